"""Prove termination or derive a precondition through the Python API.

    python demos/analyze_api.py
"""

from termloop import prove_termination, precondition
from termloop.frontend.parser import parse_loop

LOOPS = {
    "descending counter": "vars x, y; path: x >= 1, x' = x + y, y' = y - 1;",
    "three counters": "vars x, y, z; path: x > 0, x' = x + y, y' = y + z, z' = z;",
    "halving step": "vars x, y; path: x < y, x' = x + y, 2*y' = y;",
}

for title, text in LOOPS.items():
    r = parse_loop(text, title).to_rel()
    v = prove_termination(r)
    print(f"== {title}")
    for m in v.W:
        print("   ranked by", m.render(r.vars))
    if v.terminates:
        print("   terminates from every state")
        continue
    p = precondition(r, v.r_bad, v.W)
    print("   may run forever inside", v.r_bad)
    print("   terminates whenever", p.P)
