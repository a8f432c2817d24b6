"""Linear ranking functions and the disjunctively well-founded candidate set."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, gcd, lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import _simplex
from .lincons import (
    EQ, GEQ, Atom, Conj, Dnf, LinExpr, entails, is_primed,
    is_sat, make_atom, negate_dnf, prime, project, render_expr,
)
from .relk import Rel, primed

LRF = "lrf"
POTENTIAL = "potential"


def normalize_f(f: LinExpr) -> LinExpr:
    """Divide by the gcd of the variable coefficients, flooring the constant.

    ``{f >= 0, f' <= f - 1}`` denotes the same integer relation before and
    after, so this is the deduplication key.
    """
    g = 0
    for _, c in f.coeffs:
        g = gcd(g, c)
    if g <= 1:
        return f
    return LinExpr(((v, c // g) for v, c in f.coeffs), f.const // g)


@dataclass(frozen=True)
class WfRel:
    """The well-founded relation ``f(x) >= 0 and f(x') <= f(x) - 1``."""

    f: LinExpr
    origin: str = LRF

    def key(self):
        return (self.f.coeffs, self.f.const)

    def f_primed(self) -> LinExpr:
        return self.f.rename({v: prime(v) for v in self.f.vars()})

    def bound_atom(self) -> Optional[Atom]:
        return make_atom(self.f.as_dict(), self.f.const, GEQ)

    def decrease_atom(self) -> Optional[Atom]:
        d = self.f - self.f_primed()
        return make_atom(d.as_dict(), d.const - 1, GEQ)

    def nondecrease_atom(self) -> Optional[Atom]:
        d = self.f_primed() - self.f
        return make_atom(d.as_dict(), d.const, GEQ)

    def as_conj(self) -> Conj:
        return Conj.of([self.bound_atom(), self.decrease_atom()])

    def ranks(self, rho: Conj) -> bool:
        """Does every transition of ``rho`` decrease ``f`` while ``f >= 0``?"""
        b, d = self.bound_atom(), self.decrease_atom()
        return (b is None or entails(rho, b)) and (d is None or entails(rho, d))

    def render(self, order: Optional[Sequence[str]] = None) -> str:
        lin = LinExpr(self.f.coeffs, 0)
        lin_p = lin.rename({v: prime(v) for v in lin.vars()})
        return (f"{render_expr(self.f, order)} >= 0 && "
                f"{render_expr(lin_p, order)} < {render_expr(lin, order)}")

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class DwfSet:
    vars: Tuple[str, ...]
    members: Tuple[WfRel, ...] = ()

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def keys(self):
        return {m.key() for m in self.members}

    def extend(self, delta: Iterable[WfRel]) -> "DwfSet":
        out = list(self.members)
        seen = self.keys()
        for m in delta:
            if m.key() not in seen:
                seen.add(m.key())
                out.append(m)
        return DwfSet(self.vars, tuple(out))


def make_wf(coeffs: Dict[str, int], const: int, origin: str) -> WfRel:
    return WfRel(normalize_f(LinExpr.of(coeffs, const)), origin)


# -- Farkas-based synthesis --------------------------------------------------

def _farkas_rows(rho: Conj, vars: Sequence[str]):
    """Linear system over (w, w0, lam, mu) whose solutions are LRFs of ``rho``.

    ``rho |= w.x + w0 >= 0`` and ``rho |= w.x - w.x' - 1 >= 0`` by the affine
    Farkas lemma (``rho`` is satisfiable).
    """
    atoms = rho.atoms
    allvars = sorted(set(vars) | set(primed(vars)) | rho.vars())
    rows = []
    for tag in ("l", "m"):
        for j, a in enumerate(atoms):
            if a.op == GEQ:
                rows.append(({f"{tag}{j}": 1}, 0, False))
        for u in allvars:
            coeffs: Dict[str, int] = {}
            for j, a in enumerate(atoms):
                k = dict(a.expr.coeffs).get(u, 0)
                if k:
                    coeffs[f"{tag}{j}"] = k
            # sum(mult * a[u]) - target[u] = 0
            if u in vars:
                coeffs[f"w:{u}"] = -1
            elif tag == "m" and is_primed(u) and u[:-1] in vars:
                coeffs[f"w:{u[:-1]}"] = 1
            rows.append((coeffs, 0, True))
        consts = {f"{tag}{j}": -a.expr.const for j, a in enumerate(atoms) if a.expr.const}
        if tag == "l":
            consts["w0"] = 1
            rows.append((consts, 0, False))   # w0 - sum(lam c) >= 0
        else:
            rows.append((consts, -1, False))  # -1 - sum(mu c) >= 0
    return rows


def synth_lrf(rho: Conj, vars: Sequence[str], bound_over: Optional[Iterable[Conj]] = None
              ) -> Optional[LinExpr]:
    """A linear ranking function for the path ``rho``, or ``None``.

    The direction comes from the Farkas system; the constant is the tightest
    integer lower bound of ``w.x`` over the regions in ``bound_over`` when
    that is finite, otherwise over ``rho`` alone.
    """
    if not is_sat(rho):
        return None
    pt = _simplex.solve(_farkas_rows(rho, vars))
    if pt is None:
        return None
    w = {v: pt.get(f"w:{v}", Fraction(0)) for v in vars}
    den = lcm(*(q.denominator for q in w.values())) if w else 1
    iw = {v: int(q * den) for v, q in w.items() if q}
    if not iw:
        return None
    g = 0
    for c in iw.values():
        g = gcd(g, c)
    iw = {v: c // g for v, c in iw.items()}

    def lower(c: Conj) -> Optional[int]:
        status, val, _ = _simplex.minimize(
            [(dict(a.expr.coeffs), a.expr.const, a.op == EQ) for a in c.atoms], iw)
        if status == "optimal":
            return ceil(val)
        return None if status == "unbounded" else "empty"

    lo = None
    if bound_over is not None:
        vals = [lower(c) for c in bound_over]
        vals = [v for v in vals if v != "empty"]
        if vals and all(v is not None for v in vals):
            lo = min(vals)
    if lo is None:
        lo = lower(rho)
        if lo is None or lo == "empty":
            return None
    f = LinExpr.of(iw, -lo)
    cand = WfRel(f)
    if not cand.ranks(rho):
        return None
    return f


def potential_rfs(rho: Conj, vars: Sequence[str]) -> List[LinExpr]:
    """Lower-bounded expressions of the guard: atoms of ``rho`` projected on ``vars``."""
    guard = project(rho, [v for v in rho.vars() if v not in vars])
    out: List[LinExpr] = []
    for a in guard.atoms:
        if a.is_false:
            continue
        exprs = [a.expr] if a.op == GEQ else [a.expr, -a.expr]
        for e in exprs:
            if e not in out:
                out.append(e)
    return out


def find_dwf_candidate(r: Rel, W: DwfSet) -> List[WfRel]:
    """New well-founded relations for the paths of ``r``.

    Paths that some member of ``W`` already ranks are set aside; the rest
    contribute their LRF, or their guard bounds when no fresh LRF exists.
    Only when that yields nothing do the set-aside paths contribute guard
    bounds, one path at a time, so W grows slowly.
    """
    delta: List[WfRel] = []
    known = W.keys()
    have = set(known)

    def add(m: WfRel) -> None:
        if m.key() not in have:
            have.add(m.key())
            delta.append(m)

    ranked: List[Conj] = []
    for rho in r.paths:
        if not is_sat(rho):
            continue
        if any(m.ranks(rho) for m in W.members):
            ranked.append(rho)
            continue
        f = synth_lrf(rho, r.vars, bound_over=r.paths)
        if f is not None:
            m = WfRel(normalize_f(f), LRF)
            if m.key() not in known:
                add(m)
                continue
        for e in potential_rfs(rho, r.vars):
            add(WfRel(normalize_f(e), POTENTIAL))
    for rho in ranked:
        if delta:
            break
        # ranked itself, but its continuations may still escape W
        for e in potential_rfs(rho, r.vars):
            add(WfRel(normalize_f(e), POTENTIAL))
    return delta


def dwf_to_rel(W: DwfSet) -> Rel:
    return Rel(W.vars, Dnf.of(m.as_conj() for m in W.members))


@lru_cache(maxsize=256)
def negate_dwf(W: DwfSet) -> Rel:
    return Rel(W.vars, negate_dnf(dwf_to_rel(W).body))
