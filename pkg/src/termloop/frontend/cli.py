"""Command line driver: ``termloop analyze|bench|oracle``.

Exit status is 0 on success, 1 when a benchmark or coherence check fails,
and 2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .bench import bench, bundled_dir
from .oracle import OracleConfig, oracle_simulate
from .parser import LoopSyntaxError, load_loop
from .report import MODES, AnalysisConfig, check_coherence, run_analysis

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODES, default="both")
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--seed-level", type=int, default=1)
    p.add_argument("--z-iters", type=int, default=5)
    p.add_argument("--fixpoint-iters", type=int, default=64)
    p.add_argument("--dnf-cap", type=int, default=512)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")


def _oracle_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--oracle-box", type=int, default=None if not required else 4,
                   metavar="B", help="box radius for concrete runs")
    p.add_argument("--oracle-steps", type=int, default=200, metavar="N",
                   help="step budget for concrete runs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="termloop",
                                 description="Termination and preconditions for linear loops.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="analyse one .loop file")
    a.add_argument("file")
    _analysis_flags(a)
    a.add_argument("--trace", action="store_true", help="include per-level details")
    _oracle_flags(a)

    b = sub.add_parser("bench", help="run a directory of .loop files against goldens")
    b.add_argument("dir", nargs="?", default=None,
                   help="benchmark directory (default: the bundled suite)")
    _analysis_flags(b)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true", help="omit wall times from JSON")

    o = sub.add_parser("oracle", help="run a loop concretely on a box of states")
    o.add_argument("file")
    o.add_argument("--state", default=None, help="single initial state, e.g. 1,0,0")
    o.add_argument("--json", action="store_true")
    _oracle_flags(o, required=True)
    return ap


def _config(ns) -> AnalysisConfig:
    return AnalysisConfig(max_depth=ns.max_depth, seed_level=ns.seed_level,
                          z_iters=ns.z_iters, fixpoint_iters=ns.fixpoint_iters,
                          dnf_cap=ns.dnf_cap, mode=ns.mode)


def _load(path: str):
    try:
        return load_loop(path)
    except LoopSyntaxError as e:
        print(f"{path}:{e}", file=sys.stderr)
    except OSError as e:
        print(f"{path}: {e.strerror}", file=sys.stderr)
    return None


def _analyze(ns) -> int:
    spec = _load(ns.file)
    if spec is None:
        return EXIT_INPUT
    report = run_analysis(spec, _config(ns), trace=ns.trace)
    status = EXIT_OK
    coherence = None
    if ns.oracle_box is not None:
        coherence = check_coherence(spec, report,
                                    OracleConfig(ns.oracle_box, ns.oracle_steps))
        if not coherence.ok:
            status = EXIT_FAIL
    if ns.json:
        d = report.to_dict()
        if coherence is not None:
            d["oracle"] = {"ok": coherence.ok, "cycles": coherence.cycles,
                           "messages": coherence.messages}
        print(json.dumps(d, indent=2))
    else:
        print(report.render_text())
        if ns.trace and report.trace:
            for lvl in report.trace:
                print(f"  level {lvl['level']}: +{len(lvl['W_delta'])} members, "
                      f"{lvl['predicates']} predicates, {lvl['gfp_iters']} rounds")
                for w in lvl["W_delta"]:
                    print(f"    + {w}")
                print(f"    R_bad {lvl['r_bad']}")
        if coherence is not None:
            tag = "ok" if coherence.ok else "MISMATCH"
            print(f"  oracle: {tag}, {coherence.cycles} cycling box states")
            for m in coherence.messages:
                print(f"    {m}")
    return status


def _bench(ns) -> int:
    directory = ns.dir or bundled_dir()
    try:
        res = bench(directory, _config(ns), ns.jobs)
    except OSError as e:
        print(f"{directory}: {e.strerror or e}", file=sys.stderr)
        return EXIT_INPUT
    if ns.json:
        print(res.to_json(timing=not ns.no_timing))
    else:
        print(res.table())
    if any(r.status == "ERROR" for r in res.rows):
        return EXIT_INPUT
    return EXIT_OK if res.ok else EXIT_FAIL


def _oracle(ns) -> int:
    spec = _load(ns.file)
    if spec is None:
        return EXIT_INPUT
    try:
        oc = OracleConfig(ns.oracle_box, ns.oracle_steps)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INPUT
    initial = None
    if ns.state is not None:
        try:
            st = tuple(int(t) for t in ns.state.split(","))
        except ValueError:
            st = ()
        if len(st) != len(spec.vars):
            print(f"--state needs {len(spec.vars)} comma-separated integers", file=sys.stderr)
            return EXIT_INPUT
        initial = [st]
    res = oracle_simulate(spec, oc, initial)
    if ns.json:
        print(json.dumps({"vars": list(spec.vars), "box": oc.box, "steps": oc.steps,
                          "outcomes": {",".join(map(str, s)): str(o)
                                       for s, o in sorted(res.outcomes.items())}},
                         indent=2))
    elif initial is not None:
        print(f"{spec.name} {ns.state}: {res.outcomes[initial[0]]}")
    else:
        counts = {k: res.count(k) for k in ("TERMINATED", "CYCLE", "BUDGET")}
        print(f"{spec.name}: {len(res.outcomes)} states in box {oc.box}: "
              + ", ".join(f"{k.lower()} {v}" for k, v in counts.items()))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return {"analyze": _analyze, "bench": _bench, "oracle": _oracle}[ns.cmd](ns)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
