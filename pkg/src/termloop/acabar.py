"""The recursive termination driver.

Each level grows the candidate W, keeps the transitions whose every
continuation stays inside W, and recurses on the rest. An empty rest
proves termination; otherwise every infinite run eventually stays inside
the returned problematic relation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional

from .absdom import compute_G, partition_traces, seed_predicates
from .lincons import DnfBlowup, Dnf, and_dnf, dnf_cap, dnf_entails, is_sat
from .ranking import DwfSet, WfRel, find_dwf_candidate
from .relk import Rel

TERMINATES = "terminates"
PROBLEMATIC = "problematic"


@dataclass(frozen=True)
class Config:
    max_depth: int = 10
    seed_level: int = 1
    fixpoint_iters: int = 64
    z_iters: int = 5
    v_seed_level: int = 3
    dnf_cap: int = 512
    keep_trace: bool = False


@dataclass
class Level:
    delta: List[WfRel]
    partitioned: Rel
    r_bad: Rel
    gfp_iters: int
    converged: bool
    n_preds: int
    ms: float
    fixpoint_trace: List[Dnf] = field(default_factory=list)


@dataclass
class AcabarTrace:
    levels: List[Level] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def gfp_iters(self) -> int:
        return sum(l.gfp_iters for l in self.levels)


@dataclass
class Verdict:
    kind: str
    r_bad: Rel
    W: DwfSet
    trace: AcabarTrace
    reason: str = ""

    @property
    def terminates(self) -> bool:
        return self.kind == TERMINATES


def _prune(r: Rel) -> Rel:
    return Rel(r.vars, Dnf.of(c for c in r.paths if is_sat(c)))


def _same_points(a: Rel, b: Rel) -> bool:
    return dnf_entails(a.body, b.body) and dnf_entails(b.body, a.body)


def acabar(r: Rel, W: DwfSet, cfg: Config = Config(),
           trace: Optional[AcabarTrace] = None) -> Verdict:
    trace = trace if trace is not None else AcabarTrace()
    with dnf_cap(cfg.dnf_cap):
        r = _prune(r)
        stalled: Optional[Rel] = None
        while True:
            if r.is_empty():
                return Verdict(TERMINATES, Rel.false(r.vars), W, trace)
            t0 = time.perf_counter()
            delta = find_dwf_candidate(r, W)
            if stalled is not None and not delta:
                # same relation, same W: another round would repeat itself
                return Verdict(PROBLEMATIC, stalled, W, trace, "no progress")
            W = W.extend(delta)
            rp = partition_traces(r, W)
            P = seed_predicates(W, rp, cfg.seed_level)
            res = compute_G(rp, W, P, cfg.fixpoint_iters, cfg.keep_trace)
            try:
                # pairs of rp outside G are exactly those inside the fixpoint A
                bad = Rel(r.vars, and_dnf(rp.body, res.A))
            except DnfBlowup:
                bad = rp
            trace.levels.append(Level(delta, rp, bad, res.iters, res.converged,
                                      len(P), (time.perf_counter() - t0) * 1000,
                                      res.trace))
            if bad.is_empty():
                return Verdict(TERMINATES, Rel.false(r.vars), W, trace)
            try:
                stuck = _same_points(bad, rp)
            except DnfBlowup:
                stuck = True
            stalled = bad if stuck else None
            if trace.depth >= cfg.max_depth:
                return Verdict(PROBLEMATIC, bad, W, trace, "depth limit")
            r = bad


def prove_termination(r: Rel, cfg: Config = Config()) -> Verdict:
    return acabar(r, DwfSet(r.vars), cfg)
