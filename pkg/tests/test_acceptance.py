"""End-to-end acceptance checks, one recorded line per criterion.

Run standalone with ``python tests/test_acceptance.py``; the summary lines
are printed after the pytest report.
"""

import time

import numpy as np
import pytest

import termloop
from conftest import ACCEPTANCE, BENCH, F, R, bench_spec
from support import (
    dnf_mask, good_part_stays_in_w, grid, oracle_violations, progress_violations, rand_conj,
    rand_dnf, rand_loop, rand_rel, rel_names, v_is_closed,
)
from termloop.acabar import TERMINATES as PROVED
from termloop.acabar import Config, acabar
from termloop.frontend.bench import bench
from termloop.frontend.oracle import OracleConfig
from termloop.frontend.report import (
    CONDITIONAL, TERMINATES, AnalysisConfig, check_coherence, run_analysis,
)
from termloop.lincons import Dnf, LinExpr, dnf_equiv, entails, negate_dnf, project
from termloop.ranking import DwfSet, WfRel, make_wf, synth_lrf
from termloop.relk import StateSet, compose, pre

XYZ, XY = ("x", "y", "z"), ("x", "y")
CASES = 500


def record(key, ok, detail):
    ACCEPTANCE[key] = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}"


def cold_run(name, **kw):
    termloop.clear_caches()
    t0 = time.perf_counter()
    rep = run_analysis(bench_spec(name), **kw)
    return rep, time.perf_counter() - t0


def check(failures, cond, msg):
    if not cond:
        failures.append(msg)


# -- 1 ----------------------------------------------------------------------

def test_criterion_1_motivating_loop():
    rep, secs = cold_run("motivating", trace=True)
    v, p = rep.verdict_obj, rep.pre_obj
    fails = []
    levels = v.trace.levels
    check(fails, [m.f for m in levels[0].delta] == [LinExpr.of({"x": 1}, -1)], "first member")
    check(fails, len(levels) > 1 and [m.f for m in levels[1].delta] == [LinExpr.of({"y": 1})],
          "second member")
    want_bad = R("x > 0 && x' = x + y && y' = y + z && z' = z && y >= 0 && z >= 0")
    check(fails, dnf_equiv(v.r_bad.body, want_bad.body), "final R_bad")
    check(fails, dnf_equiv(p.Z.body, F("x > 0 && y >= 0 && z >= 0")), "Z")
    six = F("x <= 0 || x + y <= 0 || x + 2*y + z <= 0 || x + 3*y + 3*z <= 0"
            " || z <= -1 || (y <= -1 && z <= 0)")
    check(fails, dnf_equiv(p.P.body, six), "six-disjunct P")
    check(fails, rep.verdict == CONDITIONAL, "verdict")
    check(fails, secs < 5.0, f"runtime {secs:.2f}s")
    record("1", not fails, f"motivating loop, {secs:.2f}s cold" + (f"; {fails}" if fails else ""))
    assert not fails


# -- 2 ----------------------------------------------------------------------

def test_criterion_2_decrementing_variant():
    rep, secs = cold_run("motivating_zdec")
    W = rep.verdict_obj.W
    fails = []
    check(fails, rep.verdict == TERMINATES, "verdict")
    check(fails, len(W) == 3, f"{len(W)} members")
    check(fails, any(m.f == LinExpr.of({"z": 1}) for m in W), "z member")
    check(fails, secs < 5.0, f"runtime {secs:.2f}s")
    record("2", not fails, f"z-decrement variant, {len(W)} members, {secs:.2f}s cold"
           + (f"; {fails}" if fails else ""))
    assert not fails


# -- 3 ----------------------------------------------------------------------

def test_criterion_3_two_rounds():
    r = R("x >= 1 && x' = x + y && y' = y - 1", XY)
    W = DwfSet(XY, (make_wf({"x": 1}, -1, "lrf"),))
    v = acabar(r, W, Config(max_depth=1))
    first = v.r_bad if v.kind != PROVED else None
    fails = []
    check(fails, first is not None and dnf_equiv(
        first.body, R("x >= 1 && x' = x + y && y' = y - 1 && y >= 0", XY).body), "R_bad(1)")
    v2 = acabar(r, W)
    check(fails, v2.kind == PROVED and v2.trace.depth == 2 and v2.r_bad.is_empty(), "R_bad(2)")
    record("3", not fails, "descending counter, R_bad(1) then empty"
           + (f"; {fails}" if fails else ""))
    assert not fails


# -- 4 ----------------------------------------------------------------------

def test_criterion_4_affine_flip():
    spec = bench_spec("loop1")
    rep = run_analysis(spec, trace=True)
    coh = check_coherence(spec, rep, OracleConfig(12, 100))
    second = rep.verdict_obj.trace.levels[1].delta if rep.verdict_obj.trace.depth > 1 else []
    fails = []
    check(fails, rep.verdict == TERMINATES, "verdict")
    check(fails, coh.ok, f"oracle: {coh.messages}")
    record("4", not fails, f"affine flip terminates, oracle B=12 N=100 clean, "
           f"second level adds [{', '.join(m.render(spec.vars) for m in second)}]"
           + (f"; {fails}" if fails else ""))
    assert not fails


# -- 5 ----------------------------------------------------------------------

def test_criterion_5_halving_loop():
    rep = run_analysis(bench_spec("loop9"))
    v, p = rep.verdict_obj, rep.pre_obj
    stuck = F("y = 0 && x <= -1", XY)
    fails = []
    check(fails, dnf_equiv(v.r_bad.body,
                           R("x < y && x' = x + y && 2*y' = y && y = 0", XY).body), "R_bad")
    check(fails, dnf_equiv(p.Z.body, stuck), "Z")
    check(fails, dnf_equiv(p.V.body, stuck), "V")
    check(fails, dnf_equiv(p.P.body, F("y >= 1 || y <= -1 || x >= 0", XY)), "P")
    check(fails, p.z_converged and p.v_converged, "convergence flags")
    record("5", not fails, "halving loop, exact and converged" + (f"; {fails}" if fails else ""))
    assert not fails


# -- 6: property suite ------------------------------------------------------

PROPS = {}


def prop(name, fails, n):
    PROPS[name] = (not fails, n, fails[:3])
    assert not fails, fails[:3]


def test_prop_negation_is_point_complement():
    rng = np.random.default_rng(601)
    fails = []
    for i in range(CASES):
        vars = XYZ[:1 + i % 3]
        phi = rand_dnf(rng, vars)
        pts = grid(len(vars), 4 if len(vars) < 3 else 3)
        if (dnf_mask(phi, vars, pts) == dnf_mask(negate_dnf(phi), vars, pts)).any():
            fails.append(str(phi))
    prop("negate_dnf complement", fails, CASES)


def test_prop_projection_sound():
    rng = np.random.default_rng(602)
    pts = grid(3, 3)
    fails = []
    for _ in range(CASES):
        c = rand_conj(rng, XYZ, 2, 4)
        inside = dnf_mask(Dnf((c,)), XYZ, pts)
        got = dnf_mask(Dnf((project(c, ["z"]),)), XYZ, pts)
        if (inside & ~got).any():
            fails.append(str(c))
    prop("projection soundness", fails, CASES)


def _pair_matrix(r, B):
    states = grid(len(r.vars), B)
    m = len(states)
    pairs = np.concatenate([np.repeat(states, m, axis=0), np.tile(states, (m, 1))], axis=1)
    return dnf_mask(r.body, rel_names(r.vars), pairs).reshape(m, m)


def test_prop_composition_sound():
    rng = np.random.default_rng(603)
    fails = []
    for _ in range(CASES):
        a, b = rand_rel(rng, XY), rand_rel(rng, XY)
        chained = (_pair_matrix(a, 2).astype(int) @ _pair_matrix(b, 2).astype(int)) > 0
        if (chained & ~_pair_matrix(compose(a, b), 2)).any():
            fails.append(f"{a} ; {b}")
    prop("composition soundness", fails, CASES)


def test_prop_pre_sound():
    rng = np.random.default_rng(604)
    states = grid(2, 3)
    fails = []
    for _ in range(CASES):
        r = rand_rel(rng, XY)
        s = StateSet(XY, rand_dnf(rng, XY))
        target = dnf_mask(s.body, XY, states)
        has_succ = (_pair_matrix(r, 3) & target[None, :]).any(axis=1)
        if (has_succ & ~dnf_mask(pre(r, s).body, XY, states)).any():
            fails.append(f"{r} / {s}")
    prop("pre soundness", fails, CASES)


def test_prop_lrf_valid():
    rng = np.random.default_rng(605)
    names = rel_names(XY)
    pairs = grid(4, 3)
    fails, found = [], 0
    for _ in range(CASES):
        paths = rand_rel(rng, XY, paths=1).paths
        if not paths:
            continue
        rho = paths[0]
        f = synth_lrf(rho, XY)
        if f is None:
            continue
        found += 1
        w = WfRel(f)
        if not (entails(rho, w.bound_atom()) and entails(rho, w.decrease_atom())):
            fails.append(f"{rho}: {f}")
            continue
        inside = dnf_mask(Dnf((rho,)), names, pairs)
        member = dnf_mask(Dnf((w.as_conj(),)), names, pairs)
        if (inside & ~member).any():
            fails.append(f"{rho}: {f} on box")
    assert found >= 25, found
    prop("LRF validity", fails, CASES)


@pytest.fixture(scope="module")
def random_runs():
    rng = np.random.default_rng(606)
    cfg = AnalysisConfig(max_depth=2, fixpoint_iters=16, dnf_cap=128)
    runs = []
    for i in range(CASES):
        spec = rand_loop(rng, i)
        runs.append((spec, run_analysis(spec, cfg)))
    return runs


def test_prop_good_part_stays_in_candidate(random_runs):
    fails = [f"{s.name}: {e}" for s, rep in random_runs
             for e in good_part_stays_in_w(rep.verdict_obj)]
    prop("R_good . R^k inside W (k <= 2)", fails, len(random_runs))


def test_prop_recursion_progress(random_runs):
    fails = [f"{s.name}: {e}" for s, rep in random_runs
             for e in progress_violations(rep.verdict_obj)]
    prop("strict progress", fails, len(random_runs))


def test_prop_oracle_cycles(random_runs):
    oc = OracleConfig(3, 100)
    fails = [f"{s.name}: {e}" for s, rep in random_runs
             for e in oracle_violations(s, rep, oc)]
    prop("cycles inside R_bad and Z, none from P", fails, len(random_runs))


def test_prop_v_closed(random_runs):
    fails = [s.name for s, rep in random_runs
             if rep.pre_obj is not None and not v_is_closed(rep.pre_obj, s.to_rel(), 3)]
    prop("V closed under pre", fails, len(random_runs))


def test_criterion_6_summary():
    expected = 9
    ok = len(PROPS) == expected and all(v[0] for v in PROPS.values())
    parts = [f"{k} {'ok' if v[0] else 'FAILED'} ({v[1]})" for k, v in sorted(PROPS.items())]
    if len(PROPS) != expected:
        parts.append(f"only {len(PROPS)}/{expected} properties ran")
    record("6", ok, "property suite: " + "; ".join(parts))
    assert ok


# -- 7 ----------------------------------------------------------------------

def test_criterion_7_bench_determinism():
    a = bench(BENCH)
    b = bench(BENCH)
    same = a.to_json(timing=False) == b.to_json(timing=False)
    s = a.summary()
    ok = same and a.ok and s["PASS"] == len(a.rows) >= 10
    record("7", ok, f"bench twice, identical JSON={same}, {s['PASS']}/{len(a.rows)} PASS")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
