"""Predicate abstraction over relations and the backward fixpoint behind G.

G is the set of pairs ``(s, t)`` in W whose every extension ``(s, u)`` with
``u`` reachable from ``t`` is also in W. It is obtained as the complement
of an over-approximated least fixpoint of ``Y -> not W  or  Y . R^-1``,
computed by Kleene iteration over positive combinations of a finite,
negation-closed predicate set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .lincons import (
    TRUE, Atom, Conj, Dnf, DnfBlowup, _check_cap, _negated_atoms,
    _scaled_point, entails, is_sat, negate_dnf, prime,
)
from .ranking import DwfSet, dwf_to_rel, negate_dwf
from .relk import MID, Rel, compose


class PredSet:
    """A negation-closed set of inequality predicates."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        out: List[Atom] = []
        seen = set()
        for a in atoms:
            if a is None or a.is_false:
                continue
            for h in a.halves():
                for p in (h, *_negated_atoms(h)):
                    if p not in seen:
                        seen.add(p)
                        out.append(p)
        self.preds: Tuple[Atom, ...] = tuple(sorted(out))

    def __len__(self):
        return len(self.preds)

    def __iter__(self):
        return iter(self.preds)

    def __contains__(self, a: Atom):
        return a in self.preds

    def union(self, other: "PredSet") -> "PredSet":
        return PredSet(self.preds + other.preds)

    def restrict(self, allowed: Sequence[str]) -> "PredSet":
        ok = set(allowed)
        return PredSet(p for p in self.preds if set(p.vars()) <= ok)


def _pairs(P: PredSet) -> List[Tuple[Atom, Optional[Atom]]]:
    """Group each predicate with its negation."""
    out, seen = [], set()
    for p in P.preds:
        if p in seen:
            continue
        n = _negated_atoms(p)[0]
        seen.add(p)
        if n in P:
            seen.add(n)
            out.append((p, n))
        else:
            out.append((p, None))
    return out


def alpha_conj(d: Conj, P: PredSet, pairs=None) -> Optional[Conj]:
    """All predicates entailed by ``d``, or ``None`` when ``d`` is empty.

    ``d`` may mention auxiliary variables; entailment of a predicate over the
    remaining ones is then entailment by the projection.
    """
    if d.is_false:
        return None
    scaled = _scaled_point(d)
    if scaled is None:
        return None
    den, pt = scaled
    keep: List[Atom] = []
    for p, n in (pairs if pairs is not None else _pairs(P)):
        for a in (p, n):
            if a is None:
                continue
            # a model of d that violates a rules the entailment out cheaply
            val = a.expr.const * den + sum(k * pt.get(v, 0) for v, k in a.expr.coeffs)
            if val < 0:
                continue
            if entails(d, a):
                keep.append(a)
                break
    return Conj(tuple(sorted(set(keep))))


def alpha(phi: Dnf, P: PredSet) -> Dnf:
    pairs = _pairs(P)
    out: List[Conj] = []
    for d in phi.disjuncts:
        c = alpha_conj(d, P, pairs)
        if c is not None:
            out.append(c)
    return _absorb(out)


def _absorb(conjs: Iterable[Conj]) -> Dnf:
    """Join of abstract disjuncts: drop those whose atom set contains another's."""
    out: List[Conj] = []
    sets: List[frozenset] = []
    for c in conjs:
        s = frozenset(c.atoms)
        if any(t <= s for t in sets):
            continue
        keep = [i for i, t in enumerate(sets) if not s <= t]
        out = [out[i] for i in keep] + [c]
        sets = [sets[i] for i in keep] + [s]
    return Dnf(tuple(out))


def partition_traces(r: Rel, W: DwfSet) -> Rel:
    """Split every path on whether each member of ``W`` decreases or not."""
    try:
        paths = list(r.paths)
        for m in W.members:
            dec, non = m.decrease_atom(), m.nondecrease_atom()
            nxt: List[Conj] = []
            for rho in paths:
                if dec is None or non is None or entails(rho, dec) or entails(rho, non):
                    nxt.append(rho)
                    continue
                for a in (dec, non):
                    c = rho & Conj((a,))
                    if not c.is_false and is_sat(c):
                        nxt.append(c)
            _check_cap(len(nxt))
            paths = nxt
    except DnfBlowup:
        return r
    return Rel(r.vars, Dnf.of(paths))


def _state_atoms(phi: Dnf) -> List[Atom]:
    return [a for a in phi.atoms() if not a.is_false]


def seed_predicates(W: DwfSet, r: Rel, level: int = 1) -> PredSet:
    """Atoms of W, of not-W, and of the first ``level`` concrete iterates."""
    notw = negate_dwf(W)
    base = _state_atoms(notw.body) + _state_atoms(dwf_to_rel(W).body)
    P = PredSet(base)
    if level <= 0:
        return P
    try:
        inv = Rel(r.vars, r.body.rename(_swap(r.vars)))
        X = notw
        extra: List[Atom] = []
        for _ in range(level):
            step = compose(X, inv)
            X = Rel(r.vars, Dnf.of(notw.body.disjuncts + step.body.disjuncts))
            _check_cap(len(X.body))
            extra += _state_atoms(X.body)
    except DnfBlowup:
        return P
    return P.union(PredSet(extra))


def _swap(vars):
    m = {v: prime(v) for v in vars}
    m.update({prime(v): v for v in vars})
    return m


@dataclass
class GResult:
    """Outcome of the backward fixpoint.

    ``A`` over-approximates the least fixpoint (pairs that may leave W),
    so ``G`` is its complement. On failure ``A`` is true and ``G`` false.
    """

    vars: Tuple[str, ...]
    A: Dnf
    iters: int
    converged: bool
    trace: List[Dnf] = field(default_factory=list)
    reason: str = ""
    _G: Optional[Dnf] = None

    @property
    def G(self) -> Rel:
        if self._G is None:
            self._G = negate_dnf(self.A)
        return Rel(self.vars, self._G)

    @property
    def A_rel(self) -> Rel:
        return Rel(self.vars, self.A)


def _compose_inverse_conj(vars: Sequence[str], y: Conj, rho: Conj) -> Conj:
    """``y . rho^-1`` for single disjuncts, leaving the middle state existential."""
    mid = {prime(v): v + MID for v in vars}
    back = {v: prime(v) for v in vars}
    back.update({prime(v): v + MID for v in vars})
    return y.rename(mid) & rho.rename(back)


def compute_G(r: Rel, W: DwfSet, P: PredSet, max_iters: int = 64,
              keep_trace: bool = False) -> GResult:
    """Kleene iteration ``A0 = alpha(not W)``, ``A+ = A0 or alpha(A . r^-1)``."""
    vars = r.vars
    pairs = _pairs(P)
    try:
        notw = negate_dwf(W).body
        start = alpha(notw, P)
        current: List[Conj] = list(start.disjuncts)
        sets = [frozenset(c.atoms) for c in current]
        trace = [Dnf(tuple(current))] if keep_trace else []
        frontier = list(current)
        rounds = 0
        while frontier:
            if rounds >= max_iters:
                return GResult(vars, TRUE, rounds, False, trace, "iteration cap")
            rounds += 1
            fresh: List[Conj] = []
            for y in frontier:
                for rho in r.paths:
                    c = alpha_conj(_compose_inverse_conj(vars, y, rho), P, pairs)
                    if c is None:
                        continue
                    s = frozenset(c.atoms)
                    if any(t <= s for t in sets):
                        continue
                    keep = [i for i, t in enumerate(sets) if not s <= t]
                    current = [current[i] for i in keep] + [c]
                    sets = [sets[i] for i in keep] + [s]
                    fresh.append(c)
                    _check_cap(len(current))
            # disjuncts absorbed later in the same round need no expansion
            frontier = [c for c in fresh if c in current]
            if keep_trace:
                trace.append(Dnf(tuple(current)))
        return GResult(vars, Dnf(tuple(current)), rounds, True, trace)
    except DnfBlowup as e:
        return GResult(vars, TRUE, 0, False, [], str(e))
