"""Sufficient preconditions for termination from the problematic relation.

Z over-approximates the states that start an infinite run of the
problematic relation, V the states that can reach Z, and the complement of
V is the precondition: no infinite run starts there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .absdom import PredSet, _pairs, alpha, alpha_conj, partition_traces
from .lincons import (
    TRUE, Atom, Dnf, DnfBlowup, _check_cap, and_dnf, dnf_cap, dnf_entails,
    negate_dnf, or_dnf, simplify_dnf,
)
from .ranking import DwfSet
from .relk import Rel, StateSet, pre, pre_conj


@dataclass
class ZResult:
    Z: StateSet
    iters: int
    converged: bool
    trace: List[StateSet] = field(default_factory=list)


@dataclass
class VResult:
    V: StateSet
    iters: int
    converged: bool
    n_preds: int = 0
    trace: List[Dnf] = field(default_factory=list)


@dataclass
class Precondition:
    Z: StateSet
    V: StateSet
    P: StateSet
    z_iters: int
    v_iters: int
    z_converged: bool
    v_converged: bool

    @property
    def optimal_hint(self) -> bool:
        return self.z_converged and self.v_converged


def approx_Z(r_bad: Rel, max_iters: int = 5) -> ZResult:
    """Descending iteration ``X0 = true``, ``X+ = X and pre(r_bad, X)``."""
    X = StateSet.true(r_bad.vars)
    trace = [X]
    for i in range(1, max_iters + 1):
        try:
            nxt = StateSet(X.vars, and_dnf(X.body, pre(r_bad, X).body))
        except DnfBlowup:
            return ZResult(X, i - 1, False, trace)
        trace.append(nxt)
        if nxt.is_empty():
            return ZResult(nxt, i, True, trace)
        try:
            stable = dnf_entails(X.body, nxt.body)
        except DnfBlowup:
            stable = False
        X = nxt
        if stable:
            return ZResult(X, i, True, trace)
    return ZResult(X, max_iters, False, trace)


def state_predicates(z: StateSet, r: Rel, level: int = 3) -> PredSet:
    """Atoms of ``X0 = z`` and ``X(i+1) = z or pre(r, X(i))`` up to ``level``."""
    atoms: List[Atom] = list(z.body.atoms())
    X = z
    seen = [X]
    try:
        for _ in range(level):
            X = StateSet(z.vars, or_dnf(z.body, pre(r, X).body))
            seen.append(X)
    except DnfBlowup:
        pass
    for S in seen[1:]:
        atoms.extend(S.body.atoms())
    return PredSet(atoms)


def _absorb_into(current, sets, c) -> bool:
    s = frozenset(c.atoms)
    if any(t <= s for t in sets):
        return False
    keep = [i for i, t in enumerate(sets) if not s <= t]
    current[:] = [current[i] for i in keep] + [c]
    sets[:] = [sets[i] for i in keep] + [s]
    return True


def approx_V(z: StateSet, r: Rel, P: Optional[PredSet] = None, max_iters: int = 64,
             W: Optional[DwfSet] = None, seed_level: int = 3,
             keep_trace: bool = False) -> VResult:
    """Abstract least fixpoint ``B0 = alpha(z)``, ``B+ = B0 or alpha(pre(r, B))``."""
    vars = z.vars
    if z.is_empty():
        return VResult(StateSet.false(vars), 0, True)
    rp = partition_traces(r, W) if W is not None else r
    if P is None:
        P = state_predicates(z, rp, seed_level)
    pairs = _pairs(P)
    try:
        start = alpha(z.body, P)
        current = list(start.disjuncts)
        sets = [frozenset(c.atoms) for c in current]
        trace = [Dnf(tuple(current))] if keep_trace else []
        frontier = list(current)
        rounds = 0
        while frontier:
            if rounds >= max_iters:
                return VResult(StateSet(vars, TRUE), rounds, False, len(P), trace)
            rounds += 1
            fresh = []
            for b in frontier:
                for rho in rp.paths:
                    c = alpha_conj(pre_conj(vars, rho, b, eliminate=False), P, pairs)
                    if c is not None and _absorb_into(current, sets, c):
                        fresh.append(c)
                        _check_cap(len(current))
            frontier = [c for c in fresh if c in current]
            if keep_trace:
                trace.append(Dnf(tuple(current)))
    except DnfBlowup:
        return VResult(StateSet(vars, TRUE), 0, False, len(P))
    return VResult(StateSet(vars, simplify_dnf(Dnf(tuple(current)))), rounds, True,
                   len(P), trace)


def precondition(r: Rel, r_bad: Rel, W: Optional[DwfSet] = None, z_iters: int = 5,
                 v_iters: int = 64, seed_level: int = 3, cap: int = 512,
                 partition: bool = False) -> Precondition:
    """Chain Z, V and the complement of V.

    With ``partition`` the paths of ``r`` are split on the members of ``W``
    while computing V; that can only add precision, at the cost of more
    disjuncts.
    """
    with dnf_cap(cap):
        zr = approx_Z(r_bad, z_iters)
        vr = approx_V(zr.Z, r, None, v_iters, W if partition else None, seed_level)
        try:
            P = StateSet(r.vars, negate_dnf(vr.V.body))
        except DnfBlowup:
            P = StateSet.false(r.vars)
    return Precondition(zr.Z, vr.V, P, zr.iters, vr.iters, zr.converged, vr.converged)
