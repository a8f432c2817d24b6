"""Analysis reports: verdict, candidate set, problematic relation, precondition."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

from ..acabar import Config, Verdict, prove_termination
from ..condterm import Precondition, precondition
from ..lincons import render_atom, render_dnf
from .oracle import CYCLE, OracleConfig, oracle_simulate
from .parser import LoopSpec

TERMINATES = "terminates"
CONDITIONAL = "conditional"
UNKNOWN = "unknown"

MODES = ("terminate", "precondition", "both")


@dataclass(frozen=True)
class AnalysisConfig(Config):
    mode: str = "both"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass
class Report:
    name: str
    verdict: str
    W: List[str]
    r_bad: str
    precondition: Optional[str]
    precondition_atoms: List[List[str]]
    stats: Dict[str, Any]
    trace: Optional[List[Dict[str, Any]]] = None
    diagnostics: List[str] = field(default_factory=list)
    # live objects for programmatic use; never serialised
    verdict_obj: Optional[Verdict] = field(default=None, repr=False)
    pre_obj: Optional[Precondition] = field(default=None, repr=False)

    def to_dict(self, timing: bool = True) -> Dict[str, Any]:
        stats = dict(self.stats)
        if not timing:
            stats.pop("ms", None)
        d: Dict[str, Any] = {
            "name": self.name,
            "verdict": self.verdict,
            "W": list(self.W),
            "r_bad": self.r_bad,
            "precondition": self.precondition,
            "precondition_atoms": self.precondition_atoms,
            "stats": stats,
        }
        if self.trace is not None:
            d["trace"] = self.trace
        if self.diagnostics:
            d["diagnostics"] = list(self.diagnostics)
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2)

    def render_text(self) -> str:
        lines = [f"{self.name}: {self.verdict}"]
        for w in self.W:
            lines.append(f"  W  {w}")
        lines.append(f"  R_bad  {self.r_bad}")
        if self.precondition is not None:
            lines.append(f"  P  {self.precondition}")
        s = self.stats
        lines.append(f"  depth={s['depth']} gfp_iters={s['gfp_iters']} "
                     f"z_iters={s['z_iters']} v_iters={s['v_iters']} ms={s['ms']:.1f}")
        for d in self.diagnostics:
            lines.append(f"  note: {d}")
        return "\n".join(lines)


def _trace(v: Verdict, order) -> List[Dict[str, Any]]:
    out = []
    for i, lvl in enumerate(v.trace.levels, 1):
        entry = {
            "level": i,
            "W_delta": [m.render(order) for m in lvl.delta],
            "r_bad": render_dnf(lvl.r_bad.body, order),
            "gfp_iters": lvl.gfp_iters,
            "converged": lvl.converged,
            "predicates": lvl.n_preds,
        }
        if lvl.fixpoint_trace:
            entry["fixpoint"] = [render_dnf(a, order) for a in lvl.fixpoint_trace]
        out.append(entry)
    return out


def run_analysis(spec: LoopSpec, cfg: AnalysisConfig = AnalysisConfig(),
                 trace: bool = False) -> Report:
    t0 = time.perf_counter()
    order = spec.vars
    rel = spec.to_rel()
    diags: List[str] = []
    if trace and not cfg.keep_trace:
        cfg = replace(cfg, keep_trace=True)
    v = prove_termination(rel, cfg)
    if v.reason:
        diags.append(f"recursion stopped: {v.reason}")
    pre: Optional[Precondition] = None
    if v.terminates:
        verdict, ptext, patoms = TERMINATES, "true", [[]]
    elif cfg.mode == "terminate":
        verdict, ptext, patoms = UNKNOWN, None, []
    else:
        pre = precondition(rel, v.r_bad, v.W, cfg.z_iters, cfg.fixpoint_iters,
                           cfg.v_seed_level, cfg.dnf_cap)
        body = pre.P.body
        ptext = render_dnf(body, order)
        patoms = sorted(sorted(render_atom(a, order) for a in c.atoms) for c in body)
        if body.is_false:
            verdict = UNKNOWN
            diags.append("precondition is false")
        elif body.is_true:
            # the problematic part admits no infinite run after all
            verdict = TERMINATES
        else:
            verdict = CONDITIONAL
        if not (pre.z_converged and pre.v_converged):
            diags.append("fixpoint did not converge; precondition is sufficient only")
    ms = (time.perf_counter() - t0) * 1000
    stats = {
        "depth": v.trace.depth,
        "gfp_iters": v.trace.gfp_iters,
        "z_iters": pre.z_iters if pre else 0,
        "v_iters": pre.v_iters if pre else 0,
        "z_converged": pre.z_converged if pre else None,
        "v_converged": pre.v_converged if pre else None,
        "ms": round(ms, 3),
    }
    return Report(
        name=spec.name,
        verdict=verdict,
        W=[m.render(order) for m in v.W.members],
        r_bad=render_dnf(v.r_bad.body, order),
        precondition=ptext,
        precondition_atoms=patoms,
        stats=stats,
        trace=_trace(v, order) if trace else None,
        diagnostics=diags,
        verdict_obj=v,
        pre_obj=pre,
    )


@dataclass
class Coherence:
    ok: bool
    cycles: int
    cycles_in_P: int
    messages: List[str]


def check_coherence(spec: LoopSpec, report: Report, oc: OracleConfig) -> Coherence:
    """Terminating verdicts admit no cycle; no state of P starts a cycle."""
    res = oracle_simulate(spec, oc)
    cycles = [s for s, o in res.outcomes.items() if o.kind == CYCLE]
    msgs: List[str] = []
    bad_p = 0
    if report.verdict == TERMINATES and cycles:
        msgs.append(f"verdict terminates but {len(cycles)} box states cycle, e.g. {cycles[0]}")
    if report.pre_obj is not None:
        P = report.pre_obj.P
        in_p = [s for s in cycles if P.holds(s)]
        bad_p = len(in_p)
        if in_p:
            msgs.append(f"{len(in_p)} cycling states satisfy the precondition, e.g. {in_p[0]}")
    ok = not msgs
    return Coherence(ok, len(cycles), bad_p, msgs)
