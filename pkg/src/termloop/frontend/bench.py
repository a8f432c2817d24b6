"""Run a directory of ``.loop`` files against ``.expected.json`` sidecars.

A sidecar holds the expected ``verdict`` and optionally a ``precondition``
and ``r_bad`` formula in the report syntax; formulas are compared by mutual
entailment, not text.
"""

from __future__ import annotations

import errno
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..lincons import DnfBlowup, dnf_equiv
from .parser import LoopSyntaxError, load_loop, parse_formula
from .report import AnalysisConfig, Report, run_analysis

PASS = "PASS"
FAIL = "FAIL"
MISSING = "MISSING"
ERROR = "ERROR"

SIDE = ".expected.json"


@dataclass
class BenchRow:
    name: str
    status: str
    verdict: Optional[str]
    expected: Optional[str]
    diffs: List[str] = field(default_factory=list)
    report: Optional[Dict[str, Any]] = None

    def to_dict(self, timing: bool = True) -> Dict[str, Any]:
        d: Dict[str, Any] = {"name": self.name, "status": self.status,
                             "verdict": self.verdict, "expected": self.expected}
        if self.diffs:
            d["diffs"] = list(self.diffs)
        if self.report is not None:
            rep = json.loads(json.dumps(self.report))
            if not timing:
                rep.get("stats", {}).pop("ms", None)
            d["report"] = rep
        return d


@dataclass
class BenchResult:
    rows: List[BenchRow]

    @property
    def ok(self) -> bool:
        return all(r.status in (PASS, MISSING) for r in self.rows)

    def summary(self) -> Dict[str, int]:
        out = {PASS: 0, FAIL: 0, MISSING: 0, ERROR: 0}
        for r in self.rows:
            out[r.status] += 1
        return out

    def to_dict(self, timing: bool = True) -> Dict[str, Any]:
        return {"rows": [r.to_dict(timing) for r in self.rows], "summary": self.summary()}

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def table(self) -> str:
        if not self.rows:
            return "(no benchmarks)"
        w = max(len(r.name) for r in self.rows)
        lines = [f"{'loop':<{w}}  status   verdict      expected     ms"]
        for r in self.rows:
            ms = r.report["stats"]["ms"] if r.report else 0.0
            lines.append(f"{r.name:<{w}}  {r.status:<7}  {r.verdict or '-':<11}  "
                         f"{r.expected or '-':<11}  {ms:8.1f}")
            for d in r.diffs:
                lines.append(f"{'':<{w}}    {d}")
        s = self.summary()
        lines.append(", ".join(f"{k.lower()} {v}" for k, v in s.items() if v))
        return "\n".join(lines)


def _same(text_a: str, text_b: str, vars, primed: bool) -> bool:
    a = parse_formula(text_a, vars, primed)
    b = parse_formula(text_b, vars, primed)
    return dnf_equiv(a, b)


def compare(report: Report, golden: Dict[str, Any], vars) -> List[str]:
    """Differences between a report and its sidecar; empty means pass."""
    diffs: List[str] = []
    exp = golden.get("verdict")
    if exp is not None and exp != report.verdict:
        diffs.append(f"verdict: got {report.verdict}, expected {exp}")
    for key, primed in (("precondition", False), ("r_bad", True)):
        want = golden.get(key)
        got = getattr(report, key)
        if want is None:
            continue
        if got is None:
            diffs.append(f"{key}: missing, expected {want}")
            continue
        try:
            same = _same(got, want, vars, primed)
        except DnfBlowup:
            same = False
        if not same:
            diffs.append(f"{key}: got {got}")
            diffs.append(f"{' ' * len(key)}  expected {want}")
    return diffs


def bench_one(path: Path, cfg: AnalysisConfig) -> BenchRow:
    name = path.name[:-len(".loop")]
    try:
        spec = load_loop(path)
    except (LoopSyntaxError, OSError) as e:
        return BenchRow(name, ERROR, None, None, [str(e)])
    report = run_analysis(spec, cfg)
    side = path.with_name(name + SIDE)
    if not side.exists():
        return BenchRow(name, MISSING, report.verdict, None, ["no golden"],
                        report.to_dict())
    golden = json.loads(side.read_text(encoding="utf-8"))
    diffs = compare(report, golden, spec.vars)
    return BenchRow(name, FAIL if diffs else PASS, report.verdict,
                    golden.get("verdict"), diffs, report.to_dict())


def bench(directory, cfg: AnalysisConfig = AnalysisConfig(), jobs: int = 1) -> BenchResult:
    """Analyse every ``.loop`` file of ``directory``; rows sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(errno.ENOTDIR, "not a directory", str(directory))
    paths = sorted(directory.glob("*.loop"))
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(bench_one, paths, [cfg] * len(paths)))
    else:
        rows = [bench_one(p, cfg) for p in paths]
    return BenchResult(rows)


def bundled_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "benchmarks"
