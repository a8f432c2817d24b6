"""Random formula/relation generators and brute-force evaluation on integer boxes."""

from __future__ import annotations

import itertools
from typing import List, Optional, Sequence

import numpy as np

from termloop.frontend.oracle import CYCLE, OracleConfig, oracle_simulate
from termloop.frontend.parser import LoopPath, LoopSpec
from termloop.lincons import EQ, GEQ, Atom, Conj, Dnf, DnfBlowup, dnf_entails, make_atom, prime
from termloop.ranking import DwfSet, dwf_to_rel
from termloop.relk import Rel, compose, minus, pre


def grid(n: int, B: int) -> np.ndarray:
    """All integer points of ``[-B, B]^n`` as rows."""
    axes = [np.arange(-B, B + 1)] * n
    return np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, n)


def atom_mask(a: Atom, names: Sequence[str], pts: np.ndarray) -> np.ndarray:
    col = {v: i for i, v in enumerate(names)}
    val = np.full(len(pts), a.expr.const, dtype=np.int64)
    for v, k in a.expr.coeffs:
        val = val + k * pts[:, col[v]]
    return val >= 0 if a.op == GEQ else val == 0


def conj_mask(c: Conj, names: Sequence[str], pts: np.ndarray) -> np.ndarray:
    m = np.ones(len(pts), dtype=bool)
    for a in c.atoms:
        m &= atom_mask(a, names, pts)
    return m


def dnf_mask(phi: Dnf, names: Sequence[str], pts: np.ndarray) -> np.ndarray:
    m = np.zeros(len(pts), dtype=bool)
    for c in phi.disjuncts:
        m |= conj_mask(c, names, pts)
    return m


def rel_names(vars: Sequence[str]) -> List[str]:
    return list(vars) + [prime(v) for v in vars]


# -- generators ---------------------------------------------------------------

def rand_atom(rng, vars: Sequence[str], kmax: int = 2, cmax: int = 3,
              eq_prob: float = 0.15) -> Atom:
    while True:
        k = int(rng.integers(1, min(2, len(vars)) + 1))
        chosen = rng.choice(len(vars), size=k, replace=False)
        coeffs = {}
        for i in chosen:
            c = 0
            while c == 0:
                c = int(rng.integers(-kmax, kmax + 1))
            coeffs[vars[int(i)]] = c
        op = EQ if rng.random() < eq_prob else GEQ
        a = make_atom(coeffs, int(rng.integers(-cmax, cmax + 1)), op)
        if a is not None and not a.is_false:
            return a


def rand_conj(rng, vars: Sequence[str], lo: int = 1, hi: int = 3, **kw) -> Conj:
    n = int(rng.integers(lo, hi + 1))
    return Conj.of(rand_atom(rng, vars, **kw) for _ in range(n))


def rand_dnf(rng, vars: Sequence[str], lo: int = 1, hi: int = 3, **kw) -> Dnf:
    n = int(rng.integers(lo, hi + 1))
    return Dnf.of(rand_conj(rng, vars, **kw) for _ in range(n))


def rand_rel(rng, vars: Sequence[str], paths: int = 2) -> Rel:
    """Random relation mixing guards, affine updates and free constraints."""
    conjs = []
    for _ in range(int(rng.integers(1, paths + 1))):
        atoms: List[Optional[Atom]] = [rand_atom(rng, vars, eq_prob=0.0)]
        for v in vars:
            p = prime(v)
            roll = rng.random()
            if roll < 0.6:
                coeffs = {p: 1, v: -int(rng.integers(-1, 2))}
                if len(vars) > 1 and rng.random() < 0.4:
                    other = vars[(vars.index(v) + 1) % len(vars)]
                    coeffs[other] = coeffs.get(other, 0) - int(rng.choice([-1, 1]))
                atoms.append(make_atom(coeffs, -int(rng.integers(-2, 3)), EQ))
            elif roll < 0.85:
                atoms.append(make_atom({v: 1, p: -1}, int(rng.integers(-2, 1)), GEQ))
            else:
                atoms.append(rand_atom(rng, list(vars) + [p]))
        conjs.append(Conj.of(atoms))
    return Rel(tuple(vars), Dnf.of(conjs))


def _lin(coeffs, const: int = 0):
    return tuple(sorted(coeffs.items())), const


def rand_loop(rng, idx: int, wide: bool = False) -> LoopSpec:
    """A small deterministic or lightly nondeterministic integer loop.

    Two-variable loops get a single path unless ``wide``; two-path
    two-variable loops are where the analysis gets expensive.
    """
    n = int(rng.integers(1, 3))
    vars = ("x", "y")[:n]
    paths = []
    for _ in range(int(rng.integers(1, 3 if (n == 1 or wide) else 2))):
        cons = []
        for _g in range(int(rng.integers(1, 3))):
            a = rand_atom(rng, vars, kmax=1, cmax=2, eq_prob=0.0)
            cons.append(((a.expr.coeffs, a.expr.const), ">=", _lin({})))
        for v in vars:
            if rng.random() < 0.15:
                # bounded nondeterministic step
                cons.append((_lin({prime(v): 1}), "<=", _lin({v: 1}, int(rng.integers(-1, 1)))))
                cons.append((_lin({prime(v): 1}), ">=", _lin({v: 1}, -2)))
                continue
            terms = {}
            for w in vars:
                c = int(rng.choice([-2, -1, 0, 0, 1, 1, 1, 2])) if w != v else int(
                    rng.choice([-1, 0, 1, 1, 1, 2]))
                if c:
                    terms[w] = c
            cons.append((_lin({prime(v): 1}), "=", _lin(terms, int(rng.integers(-2, 3)))))
        paths.append(LoopPath(None, tuple(cons)))
    return LoopSpec(f"rand{idx}", vars, tuple(paths))


# -- checks on analysis results ----------------------------------------------

def levels_with_w(verdict):
    """``(level, cumulative W)`` for every level of an analysis trace."""
    W = DwfSet(verdict.W.vars)
    for lvl in verdict.trace.levels:
        W = W.extend(lvl.delta)
        yield lvl, W


def good_part_stays_in_w(verdict, steps: int = 2) -> List[str]:
    """Symbolic check that ``R_good . R^k`` lies in W for ``k <= steps``."""
    bad = []
    for i, (lvl, W) in enumerate(levels_with_w(verdict), 1):
        rp = lvl.partitioned
        try:
            X = minus(rp, lvl.r_bad)
            w = dwf_to_rel(W).body
            for k in range(steps + 1):
                if not dnf_entails(X.body, w):
                    bad.append(f"level {i}: R_good . R^{k} leaves W")
                    break
                X = compose(X, rp)
        except DnfBlowup:
            continue
    return bad


def progress_violations(verdict) -> List[str]:
    """Each level's residue lies in its input; equal residues end the recursion
    unless the next level grows W."""
    out = []
    levels = verdict.trace.levels
    for i, lvl in enumerate(levels):
        inp, res = lvl.partitioned.body, lvl.r_bad.body
        if not dnf_entails(res, inp):
            out.append(f"level {i + 1}: residue not inside its input")
        elif dnf_entails(inp, res) and i + 1 < len(levels) and not levels[i + 1].delta:
            out.append(f"level {i + 1}: no progress but recursion continued")
    return out


def oracle_violations(spec, report, oc: OracleConfig) -> List[str]:
    """Concrete cycles against the verdict, the residue, Z and P."""
    v, pre_res = report.verdict_obj, report.pre_obj
    res = oracle_simulate(spec, oc)
    out = []
    edges = res.cycle_edges()
    if v.terminates and edges:
        out.append(f"terminates but cycle edge {edges[0]}")
    for s, t in edges:
        if not v.r_bad.holds(s, t):
            out.append(f"cycle edge {s}->{t} outside R_bad")
            break
    if pre_res is not None:
        on_cycle = {s for s, _ in edges}
        for s in sorted(on_cycle):
            if not pre_res.Z.holds(s):
                out.append(f"cycle state {s} outside Z")
                break
        for s, o in sorted(res.outcomes.items()):
            if o.kind == CYCLE and pre_res.P.holds(s):
                out.append(f"cycling state {s} satisfies P")
                break
    return out


def v_is_closed(pre_res, r: Rel, B: int) -> bool:
    """Z inside V and pre(r, V) inside V on the box, once V has converged."""
    if not pre_res.v_converged:
        return True
    vars = r.vars
    pts = grid(len(vars), B)
    V = dnf_mask(pre_res.V.body, vars, pts)
    Z = dnf_mask(pre_res.Z.body, vars, pts)
    back = dnf_mask(pre(r, pre_res.V).body, vars, pts)
    return not (Z & ~V).any() and not (back & ~V).any()
