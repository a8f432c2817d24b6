import numpy as np
import pytest

from conftest import R, bench_spec
from support import (
    good_part_stays_in_w, levels_with_w, oracle_violations, progress_violations, rand_loop,
)
from termloop.acabar import PROBLEMATIC, TERMINATES, Config, acabar, prove_termination
from termloop.frontend.oracle import OracleConfig
from termloop.frontend.report import run_analysis
from termloop.lincons import LinExpr, dnf_equiv
from termloop.ranking import DwfSet, WfRel
from termloop.relk import Rel

XYZ, XY = ("x", "y", "z"), ("x", "y")
MOTIVATING = "x >= 1 && x' = x + y && y' = y + z && z' = z"


@pytest.fixture(scope="module")
def verdicts():
    names = ["ex1", "motivating", "motivating_zdec", "loop1", "loop9"]
    return {n: prove_termination(bench_spec(n).to_rel()) for n in names}


def fs(members):
    return [m.f for m in members]


def test_two_rounds_for_descending_counter(verdicts):
    v = verdicts["ex1"]
    assert v.kind == TERMINATES
    assert fs(v.W) == [LinExpr.of({"x": 1}, -1), LinExpr.of({"y": 1})]
    first = v.trace.levels[0].r_bad
    assert dnf_equiv(first.body, R("x >= 1 && x' = x + y && y' = y - 1 && y >= 0", XY).body)
    assert v.r_bad.is_empty()


def test_motivating_loop_is_problematic(verdicts):
    v = verdicts["motivating"]
    assert v.kind == PROBLEMATIC
    assert fs(v.W)[:2] == [LinExpr.of({"x": 1}, -1), LinExpr.of({"y": 1})]
    assert dnf_equiv(v.r_bad.body, R(MOTIVATING + " && y >= 0 && z >= 0").body)


def test_decrementing_third_counter_terminates(verdicts):
    v = verdicts["motivating_zdec"]
    assert v.kind == TERMINATES
    assert fs(v.W) == [LinExpr.of({"x": 1}, -1), LinExpr.of({"y": 1}), LinExpr.of({"z": 1})]


def test_affine_flip_terminates_in_two_levels(verdicts):
    v = verdicts["loop1"]
    assert v.kind == TERMINATES and v.trace.depth == 2
    (second,) = v.trace.levels[1].delta
    # -x is bounded below on the increasing half; the exact constant is ours
    assert dict(second.f.coeffs) == {"x": -1}


def test_halving_loop_residue(verdicts):
    v = verdicts["loop9"]
    assert v.kind == PROBLEMATIC
    want = R("x < y && x' = x + y && 2*y' = y && y = 0", XY)
    assert dnf_equiv(v.r_bad.body, want.body)


def test_empty_relation_terminates_at_once():
    v = prove_termination(Rel.false(XY))
    assert v.kind == TERMINATES and v.trace.depth == 0


def test_depth_limit_is_reported():
    v = prove_termination(R(MOTIVATING), Config(max_depth=1))
    assert v.kind == PROBLEMATIC and v.reason == "depth limit"
    assert v.trace.depth == 1


def test_no_progress_is_reported():
    # a loop that never leaves its guard: every member is escaped forever
    v = prove_termination(R("x >= 0 && x' = x", ("x",)))
    assert v.kind == PROBLEMATIC
    assert v.reason in ("no progress", "depth limit")
    assert dnf_equiv(v.r_bad.body, R("x >= 0 && x' = x", ("x",)).body)


def test_starting_from_given_candidate():
    W = DwfSet(XY, (WfRel(LinExpr.of({"x": 1}, -1)),))
    v = acabar(R("x >= 1 && x' = x + y && y' = y - 1", XY), W)
    assert v.kind == TERMINATES
    assert v.W.members[0] == W.members[0]


def test_candidate_set_only_grows(verdicts):
    for v in verdicts.values():
        sizes = [len(W) for _, W in levels_with_w(v)]
        assert sizes == sorted(sizes)
        for m in v.W:
            assert m.bound_atom() is not None


@pytest.mark.parametrize("name", ["ex1", "motivating", "motivating_zdec", "loop1", "loop9"])
def test_good_part_composes_into_candidate(verdicts, name):
    assert good_part_stays_in_w(verdicts[name]) == []


@pytest.mark.parametrize("name", ["ex1", "motivating", "motivating_zdec", "loop1", "loop9"])
def test_recursion_makes_progress(verdicts, name):
    assert progress_violations(verdicts[name]) == []


@pytest.mark.parametrize("name", ["ex1", "motivating", "loop1", "loop9", "stutter"])
def test_cycles_stay_in_residue(name):
    spec = bench_spec(name)
    rep = run_analysis(spec)
    assert oracle_violations(spec, rep, OracleConfig(4, 200)) == []


def test_random_loops_small_sample():
    rng = np.random.default_rng(99)
    cfg = Config(max_depth=2, fixpoint_iters=16, dnf_cap=128)
    for i in range(25):
        spec = rand_loop(rng, i)
        v = prove_termination(spec.to_rel(), cfg)
        assert good_part_stays_in_w(v) == [], spec
        assert progress_violations(v) == [], spec
