import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from termloop.frontend.parser import load_loop, parse_formula, parse_rel, parse_stateset  # noqa: E402
from termloop.frontend.bench import bundled_dir  # noqa: E402

BENCH = bundled_dir()


def F(text, vars=("x", "y", "z"), primed=False):
    """Formula from text, for compact expectations."""
    return parse_formula(text, vars, primed)


def R(text, vars=("x", "y", "z")):
    return parse_rel(text, vars)


def S(text, vars=("x", "y", "z")):
    return parse_stateset(text, vars)


def bench_spec(name):
    return load_loop(BENCH / f"{name}.loop")


@pytest.fixture(scope="session")
def specs():
    return {p.stem: load_loop(p) for p in sorted(BENCH.glob("*.loop"))}


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
