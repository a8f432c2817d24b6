"""Transition relations and state sets as DNF formulas, with their algebra."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .lincons import (
    EQ, FALSE, TRUE, Conj, Dnf, and_dnf, is_sat, make_atom, negate_dnf,
    or_dnf, prime, project, render_dnf, simplify_dnf, _check_cap,
)

MID = "~"


def primed(vars: Sequence[str]) -> Tuple[str, ...]:
    return tuple(prime(v) for v in vars)


def _mid(v: str) -> str:
    return v + MID


@dataclass(frozen=True)
class StateSet:
    vars: Tuple[str, ...]
    body: Dnf

    def __post_init__(self):
        bad = {v for v in self.body.vars() if v not in self.vars}
        if bad:
            raise ValueError(f"state set mentions undeclared variables {sorted(bad)}")

    @classmethod
    def true(cls, vars) -> "StateSet":
        return cls(tuple(vars), TRUE)

    @classmethod
    def false(cls, vars) -> "StateSet":
        return cls(tuple(vars), FALSE)

    def is_empty(self) -> bool:
        return all(not is_sat(c) for c in self.body)

    def holds(self, state: Sequence[int]) -> bool:
        return self.body.holds(dict(zip(self.vars, state)))

    def render(self) -> str:
        return render_dnf(self.body, self.vars)

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Rel:
    vars: Tuple[str, ...]
    body: Dnf

    def __post_init__(self):
        allowed = set(self.vars) | set(primed(self.vars))
        bad = {v for v in self.body.vars() if v not in allowed}
        if bad:
            raise ValueError(f"relation mentions undeclared variables {sorted(bad)}")

    @classmethod
    def of(cls, vars, conjs: Iterable[Conj]) -> "Rel":
        return cls(tuple(vars), Dnf.of(conjs))

    @classmethod
    def true(cls, vars) -> "Rel":
        return cls(tuple(vars), TRUE)

    @classmethod
    def false(cls, vars) -> "Rel":
        return cls(tuple(vars), FALSE)

    @classmethod
    def identity(cls, vars) -> "Rel":
        c = Conj.of(make_atom({prime(v): 1, v: -1}, 0, EQ) for v in vars)
        return cls(tuple(vars), Dnf.of([c]))

    @property
    def paths(self) -> Tuple[Conj, ...]:
        return self.body.disjuncts

    def is_empty(self) -> bool:
        return all(not is_sat(c) for c in self.body)

    def holds(self, s: Sequence[int], t: Sequence[int]) -> bool:
        pt = dict(zip(self.vars, s))
        pt.update(zip(primed(self.vars), t))
        return self.body.holds(pt)

    def with_body(self, body: Dnf) -> "Rel":
        return Rel(self.vars, body)

    def render(self) -> str:
        return render_dnf(self.body, self.vars)

    def __str__(self):
        return self.render()


def _same(a, b) -> None:
    if a.vars != b.vars:
        raise ValueError(f"variable lists differ: {a.vars} vs {b.vars}")


def compose_conj(vars: Sequence[str], c1: Conj, c2: Conj, eliminate: bool = True) -> Conj:
    """The relational composition of two paths: first ``c1``, then ``c2``.

    With ``eliminate=False`` the middle variables ``v~`` are left in place,
    which is an exact (existentially read) representation.
    """
    to_mid1 = {prime(v): _mid(v) for v in vars}
    to_mid2 = {v: _mid(v) for v in vars}
    c = c1.rename(to_mid1) & c2.rename(to_mid2)
    if not eliminate:
        return c
    return project(c, [_mid(v) for v in vars])


def compose(r1: Rel, r2: Rel) -> Rel:
    _same(r1, r2)
    out: List[Conj] = []
    for c1 in r1.paths:
        for c2 in r2.paths:
            c = compose_conj(r1.vars, c1, c2)
            if not c.is_false:
                out.append(c)
    _check_cap(len(out))
    return Rel(r1.vars, simplify_dnf(Dnf.of(out)))


def _swap(vars: Sequence[str]) -> Dict[str, str]:
    m = {v: prime(v) for v in vars}
    m.update({prime(v): v for v in vars})
    return m


def inverse(r: Rel) -> Rel:
    return Rel(r.vars, r.body.rename(_swap(r.vars)))


def pre_conj(vars: Sequence[str], rho: Conj, s: Conj, eliminate: bool = True) -> Conj:
    c = rho & s.rename({v: prime(v) for v in vars})
    if not eliminate:
        return c
    return project(c, primed(vars))


def pre(r: Rel, s: StateSet) -> StateSet:
    """States with an ``r``-successor in ``s``."""
    _same(r, s)
    out: List[Conj] = []
    for rho in r.paths:
        for c in s.body:
            p = pre_conj(r.vars, rho, c)
            if not p.is_false:
                out.append(p)
    _check_cap(len(out))
    return StateSet(r.vars, simplify_dnf(Dnf.of(out)))


def post(r: Rel, s: StateSet) -> StateSet:
    """States reachable from ``s`` in one ``r`` step."""
    return pre(inverse(r), s)


def domain(r: Rel) -> StateSet:
    """The guard region: states with some successor."""
    return pre(r, StateSet.true(r.vars))


def meet(r1, r2):
    _same(r1, r2)
    return type(r1)(r1.vars, and_dnf(r1.body, r2.body))


def join(r1, r2):
    _same(r1, r2)
    return type(r1)(r1.vars, or_dnf(r1.body, r2.body))


def minus(r1, r2):
    _same(r1, r2)
    return type(r1)(r1.vars, and_dnf(r1.body, negate_dnf(r2.body)))


def complement(x):
    return type(x)(x.vars, negate_dnf(x.body))


def compose_power(r: Rel, k: int) -> Rel:
    """``r`` composed with itself ``k`` times; ``k = 0`` gives the identity."""
    out = Rel.identity(r.vars)
    for _ in range(k):
        out = compose(out, r)
    return out
