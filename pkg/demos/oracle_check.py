"""Cross-check an analysis against concrete runs on a small box of states.

    python demos/oracle_check.py [name] [radius]
"""

import sys

from termloop.frontend.bench import bundled_dir
from termloop.frontend.oracle import CYCLE, OracleConfig, oracle_simulate
from termloop.frontend.parser import load_loop
from termloop.frontend.report import run_analysis

name = sys.argv[1] if len(sys.argv) > 1 else "loop9"
radius = int(sys.argv[2]) if len(sys.argv) > 2 else 3

spec = load_loop(bundled_dir() / f"{name}.loop")
rep = run_analysis(spec)
runs = oracle_simulate(spec, OracleConfig(radius, 200))
print(f"{name}: {rep.verdict}, precondition {rep.precondition}")
for state, outcome in sorted(runs.outcomes.items()):
    if outcome.kind == CYCLE:
        safe = rep.pre_obj is not None and rep.pre_obj.P.holds(state)
        print(f"  {state} cycles" + ("  << inside precondition!" if safe else ""))
