"""Integer linear constraints: atoms, conjunctions and DNF formulas.

Atoms are kept in an integer-tightened canonical form, ``e >= 0`` or
``e = 0`` with coprime variable coefficients, so strict and non-strict
surface syntax collapse to one representation. Satisfiability and
entailment are decided on the rational relaxation with an exact simplex;
an "unsat" answer is therefore sound for the integers, which is the only
direction the analysis relies on. Negation is integer-exact.

Variables are plain strings. A primed copy is ``name + "'"``.
"""

from __future__ import annotations

import contextlib
import contextvars
import threading
from collections import OrderedDict
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import _simplex

GEQ = ">="
EQ = "="

__all__ = [
    "GEQ", "EQ", "DnfBlowup", "LinExpr", "Atom", "Conj", "Dnf",
    "TRUE", "FALSE", "FALSE_ATOM", "prime", "unprime", "is_primed",
    "make_atom", "normalize_atom", "negate_atom", "negate_dnf", "is_sat",
    "sat_point", "entails", "conj_entails", "project", "simplify_conj",
    "simplify_dnf", "and_dnf", "or_dnf", "dnf_entails", "dnf_equiv",
    "dnf_cap", "render_atom", "render_conj", "render_dnf", "var_order_key",
    "clear_caches",
]


# -- variables --------------------------------------------------------------

def prime(v: str) -> str:
    return v + "'"


def unprime(v: str) -> str:
    return v[:-1] if v.endswith("'") else v


def is_primed(v: str) -> bool:
    return v.endswith("'")


# -- blow-up cap ------------------------------------------------------------

_CAP = contextvars.ContextVar("dnf_cap", default=512)


class DnfBlowup(Exception):
    """A DNF operation exceeded the configured disjunct cap."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"DNF grew to {size} disjuncts (cap {cap})")
        self.size = size
        self.cap = cap


@contextlib.contextmanager
def dnf_cap(limit: int):
    token = _CAP.set(limit)
    try:
        yield
    finally:
        _CAP.reset(token)


def _check_cap(n: int) -> None:
    cap = _CAP.get()
    if n > cap:
        raise DnfBlowup(n, cap)


# -- expressions and atoms --------------------------------------------------

class LinExpr:
    """``const + sum(c * v)``; zero coefficients are never stored."""

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs: Iterable[Tuple[str, int]] = (), const: int = 0):
        self.coeffs: Tuple[Tuple[str, int], ...] = tuple(
            sorted((v, c) for v, c in coeffs if c))
        self.const = const
        self._hash = hash((self.coeffs, const))

    @classmethod
    def of(cls, coeffs: Mapping[str, int], const: int = 0) -> "LinExpr":
        return cls(coeffs.items(), const)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.coeffs)

    def vars(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, LinExpr) and self._hash == other._hash
                and self.coeffs == other.coeffs and self.const == other.const)

    def __hash__(self):
        return self._hash

    def __add__(self, other: "LinExpr") -> "LinExpr":
        d = self.as_dict()
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return LinExpr.of(d, self.const + other.const)

    def __neg__(self) -> "LinExpr":
        return LinExpr(((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + (-other)

    def scale(self, k: int) -> "LinExpr":
        return LinExpr(((v, k * c) for v, c in self.coeffs), k * self.const)

    def rename(self, mapping: Mapping[str, str]) -> "LinExpr":
        d: Dict[str, int] = {}
        for v, c in self.coeffs:
            w = mapping.get(v, v)
            d[w] = d.get(w, 0) + c
        return LinExpr.of(d, self.const)

    def evaluate(self, point: Mapping[str, int]):
        return self.const + sum(c * point[v] for v, c in self.coeffs)

    def __repr__(self):
        return f"LinExpr({render_expr(self)!r})"


class Atom:
    """Canonical ``expr >= 0`` or ``expr = 0``. Build through :func:`make_atom`."""

    __slots__ = ("expr", "op", "_hash", "_key")

    def __init__(self, expr: LinExpr, op: str):
        self.expr = expr
        self.op = op
        self._hash = hash((expr, op))
        self._key = (op != GEQ, expr.coeffs, expr.const)

    def __eq__(self, other):
        return (isinstance(other, Atom) and self._hash == other._hash
                and self._key == other._key)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return self._key

    def __lt__(self, other: "Atom"):
        return self._key < other._key

    @property
    def is_false(self) -> bool:
        return not self.expr.coeffs

    def vars(self) -> Tuple[str, ...]:
        return self.expr.vars()

    def holds(self, point: Mapping[str, int]) -> bool:
        val = self.expr.evaluate(point)
        return val >= 0 if self.op == GEQ else val == 0

    def rename(self, mapping: Mapping[str, str]) -> "Atom":
        return make_atom(self.expr.rename(mapping).as_dict(), self.expr.const, self.op)

    def halves(self) -> List["Atom"]:
        """An equality as its two inequalities; an inequality as itself."""
        if self.op == GEQ:
            return [self]
        return [make_atom(self.expr.as_dict(), self.expr.const, GEQ),
                make_atom((-self.expr).as_dict(), -self.expr.const, GEQ)]

    def __repr__(self):
        return f"Atom({render_atom(self)!r})"


FALSE_ATOM = Atom(LinExpr((), -1), GEQ)


def make_atom(coeffs: Mapping[str, int], const: int, op: str) -> Optional[Atom]:
    """Canonical atom for ``coeffs.x + const (op) 0``; ``None`` stands for true."""
    terms = [(v, c) for v, c in coeffs.items() if c]
    if not terms:
        ok = const >= 0 if op == GEQ else const == 0
        return None if ok else FALSE_ATOM
    g = 0
    for _, c in terms:
        g = gcd(g, c)
    if op == GEQ:
        return Atom(LinExpr(((v, c // g) for v, c in terms), floor(Fraction(const, g))), GEQ)
    if const % g:
        return FALSE_ATOM
    terms.sort()
    if terms[0][1] < 0:
        g = -g
    return Atom(LinExpr(((v, c // g) for v, c in terms), const // g), EQ)


_SURFACE = {"=": EQ, "==": EQ, ">=": ">=", "<=": "<=", ">": ">", "<": "<"}


def _as_int(c) -> int:
    if isinstance(c, bool):
        raise ValueError("boolean is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    raise ValueError(f"non-integer coefficient {c!r}")


def normalize_atom(lhs: Tuple[Mapping[str, int], int], op: str,
                   rhs: Tuple[Mapping[str, int], int]) -> List[Atom]:
    """Canonicalise the surface constraint ``lhs op rhs``.

    Each side is ``(coeffs, const)``. Returns the resulting atoms; an empty
    list means the constraint is trivially true, ``[FALSE_ATOM]`` that it is
    unsatisfiable over the integers.
    """
    if op not in _SURFACE:
        raise ValueError(f"unknown operator {op!r}")
    op = _SURFACE[op]
    d: Dict[str, int] = {}
    for v, c in lhs[0].items():
        d[v] = d.get(v, 0) + _as_int(c)
    for v, c in rhs[0].items():
        d[v] = d.get(v, 0) - _as_int(c)
    k = _as_int(lhs[1]) - _as_int(rhs[1])
    if op == ">=":
        a = make_atom(d, k, GEQ)
    elif op == ">":
        a = make_atom(d, k - 1, GEQ)
    elif op == "<=":
        a = make_atom({v: -c for v, c in d.items()}, -k, GEQ)
    elif op == "<":
        a = make_atom({v: -c for v, c in d.items()}, -k - 1, GEQ)
    else:
        a = make_atom(d, k, EQ)
    return [] if a is None else [a]


def negate_atom(a: Atom) -> "Dnf":
    """Integer complement of an atom."""
    if a.is_false:
        return TRUE
    t = a.expr
    if a.op == GEQ:
        return Dnf.of([Conj.of([make_atom((-t).as_dict(), -t.const - 1, GEQ)])])
    return Dnf.of([Conj.of([make_atom(t.as_dict(), t.const - 1, GEQ)]),
                   Conj.of([make_atom((-t).as_dict(), -t.const - 1, GEQ)])])


def _negated_atoms(a: Atom) -> List[Atom]:
    return [c.atoms[0] for c in negate_atom(a).disjuncts]


# -- conjunctions -----------------------------------------------------------

class Conj:
    """A conjunction of canonical atoms; ``Conj(())`` is true."""

    __slots__ = ("atoms", "_hash", "_set", "_key")

    def __init__(self, atoms: Tuple[Atom, ...]):
        self.atoms = atoms
        self._hash = hash(atoms)
        self._set = None
        # plain tuples compare in C; cache lookups compare keys a lot
        self._key = tuple(a._key for a in atoms)

    def has(self, a: Atom) -> bool:
        """Syntactic membership, O(1) after the first call."""
        if self._set is None:
            self._set = frozenset(self.atoms)
        return a in self._set

    @classmethod
    def of(cls, atoms: Iterable[Optional[Atom]]) -> "Conj":
        """Deduplicate, merge parallel bounds and detect syntactic conflicts."""
        geq: Dict[tuple, int] = {}
        eqs: Dict[tuple, int] = {}
        for a in atoms:
            if a is None:
                continue
            if a.is_false:
                return FALSE_CONJ
            key = a.expr.coeffs
            if a.op == GEQ:
                # keep the tightest (smallest) constant
                if key not in geq or a.expr.const < geq[key]:
                    geq[key] = a.expr.const
            else:
                if key in eqs and eqs[key] != a.expr.const:
                    return FALSE_CONJ
                eqs[key] = a.expr.const
        out: List[Atom] = []
        done = set()
        for key, c in eqs.items():
            neg = tuple((v, -k) for v, k in key)
            for k2, sign in ((key, 1), (neg, -1)):
                if k2 in geq:
                    # t + c = 0 and s*t + d >= 0  ->  d - s*c >= 0
                    if geq[k2] - sign * c < 0:
                        return FALSE_CONJ
                    done.add(k2)
            out.append(Atom(LinExpr(key, c), EQ))
        for key, c in geq.items():
            if key in done:
                continue
            neg = tuple((v, -k) for v, k in key)
            if neg in geq and neg not in done:
                d = geq[neg]
                # t + c >= 0 and -t + d >= 0  ->  -c <= t <= d
                if -c > d:
                    return FALSE_CONJ
                if -c == d:
                    done.add(key)
                    done.add(neg)
                    a = make_atom(dict(key), c, EQ)
                    out.append(a)
                    continue
            out.append(Atom(LinExpr(key, c), GEQ))
        return cls(tuple(sorted(out, key=Atom.sort_key)))

    def __eq__(self, other):
        return isinstance(other, Conj) and self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __and__(self, other: "Conj") -> "Conj":
        return Conj.of(self.atoms + other.atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    @property
    def is_false(self) -> bool:
        return len(self.atoms) == 1 and self.atoms[0].is_false

    def vars(self) -> set:
        return {v for a in self.atoms for v in a.vars()}

    def rename(self, mapping: Mapping[str, str]) -> "Conj":
        return _rename_conj(self, tuple(sorted(mapping.items())))

    def holds(self, point: Mapping[str, int]) -> bool:
        return all(a.holds(point) for a in self.atoms)

    def __repr__(self):
        return f"Conj({render_conj(self)!r})"


@lru_cache(maxsize=100_000)
def _rename_conj(c: Conj, mapping: Tuple[Tuple[str, str], ...]) -> Conj:
    m = dict(mapping)
    return Conj.of(a.rename(m) for a in c.atoms)


FALSE_CONJ = Conj((FALSE_ATOM,))
TRUE_CONJ = Conj(())


class Dnf:
    """A disjunction of conjunctions; no disjuncts is false."""

    __slots__ = ("disjuncts", "_hash")

    def __init__(self, disjuncts: Tuple[Conj, ...]):
        self.disjuncts = disjuncts
        self._hash = hash(disjuncts)

    @classmethod
    def of(cls, conjs: Iterable[Conj]) -> "Dnf":
        seen = []
        for c in conjs:
            if c.is_false or c in seen:
                continue
            seen.append(c)
        return cls(tuple(seen))

    def __eq__(self, other):
        return isinstance(other, Dnf) and self.disjuncts == other.disjuncts

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.disjuncts)

    def __iter__(self):
        return iter(self.disjuncts)

    @property
    def is_false(self) -> bool:
        return not self.disjuncts

    @property
    def is_true(self) -> bool:
        return any(not c.atoms for c in self.disjuncts)

    def atoms(self) -> List[Atom]:
        out: List[Atom] = []
        for c in self.disjuncts:
            for a in c.atoms:
                if a not in out:
                    out.append(a)
        return out

    def vars(self) -> set:
        return {v for c in self.disjuncts for v in c.vars()}

    def rename(self, mapping: Mapping[str, str]) -> "Dnf":
        return Dnf.of(c.rename(mapping) for c in self.disjuncts)

    def holds(self, point: Mapping[str, int]) -> bool:
        return any(c.holds(point) for c in self.disjuncts)

    def __repr__(self):
        return f"Dnf({render_dnf(self)!r})"


TRUE = Dnf((TRUE_CONJ,))
FALSE = Dnf(())


# -- rational relaxation queries --------------------------------------------

def _rows(atoms: Iterable[Atom]):
    return [(dict(a.expr.coeffs), a.expr.const, a.op == EQ) for a in atoms]


@lru_cache(maxsize=200_000)
def sat_point(c: Conj) -> Optional[Dict[str, Fraction]]:
    """A rational model of ``c`` or ``None``."""
    if c.is_false:
        return None
    if not c.atoms:
        return {}
    return _simplex.solve(_rows(c.atoms))


@lru_cache(maxsize=200_000)
def _scaled_point(c: Conj) -> Optional[Tuple[int, Dict[str, int]]]:
    """``sat_point`` over a common denominator, for integer-only evaluation."""
    pt = sat_point(c)
    if pt is None:
        return None
    den = 1
    for q in pt.values():
        den = den * q.denominator // gcd(den, q.denominator)
    return den, {v: int(q * den) for v, q in pt.items()}


def is_sat(c: Conj) -> bool:
    return sat_point(c) is not None


_witnesses: Dict[Conj, List[Dict[str, Fraction]]] = {}
# cached tableaux are mutated by warm-started queries
_lock = threading.RLock()


def _remember(c: Conj, pt: Dict[str, Fraction]) -> None:
    lst = _witnesses.setdefault(c, [])
    if len(lst) < 8:
        lst.append(pt)
    if len(_witnesses) > 100_000:
        _witnesses.clear()


def _violates(pt: Mapping[str, Fraction], a: Atom) -> bool:
    val = a.expr.const + sum(k * pt.get(v, 0) for v, k in a.expr.coeffs)
    return val < 0 if a.op == GEQ else val != 0


_regions: "OrderedDict[Conj, _simplex.Region]" = OrderedDict()
_REGION_CACHE = 512


def _region(c: Conj) -> _simplex.Region:
    reg = _regions.get(c)
    if reg is None:
        reg = _simplex.Region(_rows(c.atoms))
        _regions[c] = reg
        if len(_regions) > _REGION_CACHE:
            _regions.popitem(last=False)
    else:
        _regions.move_to_end(c)
    return reg


def clear_caches() -> None:
    """Drop memoized LP results, for memory or for cold-start timing."""
    with _lock:
        for fn in (_rename_conj, sat_point, _scaled_point, _entails_geq, simplify_conj):
            fn.cache_clear()
        _witnesses.clear()
        _regions.clear()


@lru_cache(maxsize=400_000)
def _entails_geq(c: Conj, a: Atom) -> bool:
    if c.has(a):
        return True
    for pt in _witnesses.get(c, ()):
        if _violates(pt, a):
            return False
    with _lock:
        reg = _region(c)
        if not reg.feasible:
            return True
        low = reg.lower_bound(dict(a.expr.coeffs))
        if low is not None and low + a.expr.const >= 0:
            return True
        pt = reg.point()
    if _violates(pt, a):
        _remember(c, pt)
    return False


def entails(c: Conj, a: Atom) -> bool:
    """``c |= a`` over the rationals (sound for the integers when true)."""
    if a.is_false:
        return not is_sat(c)
    if c.is_false or c.has(a):
        return True
    return all(_entails_geq(c, h) for h in a.halves())


def conj_entails(c: Conj, d: Conj) -> bool:
    scaled = _scaled_point(c)
    if scaled is None:
        return True
    # a model of c violating d settles it without an LP
    den, num = scaled
    for a in d.atoms:
        if c.has(a):
            continue
        val = a.expr.const * den + sum(k * num.get(v, 0) for v, k in a.expr.coeffs)
        if val < 0 if a.op == GEQ else val != 0:
            return False
    return all(entails(c, a) for a in d.atoms)


# -- projection -------------------------------------------------------------

def _substitute(atom: Atom, v: str, eq: Atom) -> Optional[Atom]:
    """Eliminate ``v`` from ``atom`` using equality ``eq``."""
    k = dict(atom.expr.coeffs).get(v, 0)
    if not k:
        return atom
    m = dict(eq.expr.coeffs)[v]
    am = abs(m)
    s = k * (1 if m > 0 else -1)
    d: Dict[str, int] = {}
    for w, c in atom.expr.coeffs:
        d[w] = d.get(w, 0) + am * c
    for w, c in eq.expr.coeffs:
        d[w] = d.get(w, 0) - s * c
    d.pop(v, None)
    return make_atom(d, am * atom.expr.const - s * eq.expr.const, atom.op)


def _fm_step(atoms: List[Atom], v: str) -> List[Atom]:
    pos, neg, rest = [], [], []
    for a in atoms:
        k = dict(a.expr.coeffs).get(v, 0)
        if k > 0:
            pos.append((k, a))
        elif k < 0:
            neg.append((-k, a))
        else:
            rest.append(a)
    out = list(rest)
    for kp, p in pos:
        for kn, n in neg:
            d: Dict[str, int] = {}
            for w, c in p.expr.coeffs:
                d[w] = d.get(w, 0) + kn * c
            for w, c in n.expr.coeffs:
                d[w] = d.get(w, 0) + kp * c
            d.pop(v, None)
            a = make_atom(d, kn * p.expr.const + kp * n.expr.const, GEQ)
            if a is not None:
                out.append(a)
    return out


def project(c: Conj, eliminate: Iterable[str], simplify: bool = True) -> Conj:
    """Existentially eliminate variables (Fourier-Motzkin over the rationals).

    Equalities are used for substitution first. The result over-approximates
    the integer projection.
    """
    elim = set(eliminate) & c.vars()
    atoms = list(c.atoms)
    if c.is_false:
        return FALSE_CONJ
    while elim:
        # prefer an equality, unit coefficient first
        best = None
        for a in atoms:
            if a.op != EQ:
                continue
            for v, k in a.expr.coeffs:
                if v in elim:
                    score = 0 if abs(k) == 1 else 1
                    if best is None or (score, v) < best[0]:
                        best = ((score, v), v, a)
        if best is not None:
            _, v, eq = best
            atoms = [_substitute(a, v, eq) for a in atoms if a is not eq]
            atoms = [a for a in atoms if a is not None]
        else:
            def cost(v):
                p = sum(1 for a in atoms if dict(a.expr.coeffs).get(v, 0) > 0)
                n = sum(1 for a in atoms if dict(a.expr.coeffs).get(v, 0) < 0)
                return (p * n - p - n, v)
            v = min(elim, key=cost)
            atoms = [h for a in atoms for h in (a.halves() if v in a.vars() else [a])]
            atoms = _fm_step(atoms, v)
        elim.discard(v)
        cj = Conj.of(atoms)
        if cj.is_false:
            return FALSE_CONJ
        atoms = list(cj.atoms)
        if len(atoms) > 24:
            atoms = list(_drop_redundant(cj).atoms)
    out = Conj.of(atoms)
    return simplify_conj(out) if simplify else out


# -- simplification ---------------------------------------------------------

def _drop_redundant(c: Conj) -> Conj:
    atoms = list(c.atoms)
    kept: List[Atom] = []
    for i, a in enumerate(atoms):
        rest = Conj.of(kept + atoms[i + 1:])
        if not entails(rest, a):
            kept.append(a)
    return Conj.of(kept)


def _pivot_key(v: str):
    # solve for primed variables first, then auxiliaries, then state variables
    return (0 if is_primed(v) else 1 if not v.isidentifier() else 2, v)


def reduce_equalities(c: Conj) -> Conj:
    """Gauss-Jordan on the equalities, substituting pivots everywhere else."""
    atoms = list(c.atoms)
    pivots: set = set()
    while True:
        # after elimination a pivot variable survives only in its own row
        eqs = [a for a in atoms if a.op == EQ and not pivots & set(a.vars())]
        if not eqs:
            return Conj.of(atoms)
        best = None
        for a in eqs:
            for v, k in a.expr.coeffs:
                key = (_pivot_key(v), abs(k) != 1)
                if best is None or key < best[0]:
                    best = (key, v, a)
        _, v, eq = best
        pivots.add(v)
        out = [eq]
        for a in atoms:
            if a is not eq:
                b = _substitute(a, v, eq)
                if b is not None:
                    out.append(b)
        cj = Conj.of(out)
        if cj.is_false:
            return FALSE_CONJ
        atoms = list(cj.atoms)


@lru_cache(maxsize=100_000)
def simplify_conj(c: Conj) -> Conj:
    """Unsat becomes false; equalities solved; atoms entailed by the others dropped."""
    if not is_sat(c):
        return FALSE_CONJ
    return _drop_redundant(reduce_equalities(c))


def _prune_syntactic(conjs: List[Conj]) -> List[Conj]:
    out: List[Conj] = []
    sets = [set(c.atoms) for c in conjs]
    for i, c in enumerate(conjs):
        dominated = False
        for j in range(len(conjs)):
            if i == j:
                continue
            if sets[j] <= sets[i] and (sets[j] != sets[i] or j < i):
                dominated = True
                break
        if not dominated:
            out.append(c)
    return out


def _prune_subsumed(conjs: List[Conj]) -> List[Conj]:
    conjs = _prune_syntactic(conjs)
    out: List[Conj] = []
    for i, c in enumerate(conjs):
        dominated = False
        for j, d in enumerate(conjs):
            if i == j:
                continue
            if conj_entails(c, d):
                # mutual entailment: keep the earlier one
                if j < i or not conj_entails(d, c):
                    dominated = True
                    break
        if not dominated:
            out.append(c)
    return out


def simplify_dnf(phi: Dnf) -> Dnf:
    """Drop unsat disjuncts, redundant atoms and subsumed disjuncts."""
    conjs = [simplify_conj(c) for c in phi.disjuncts]
    conjs = [c for c in conjs if not c.is_false]
    if any(not c.atoms for c in conjs):
        return TRUE
    return Dnf.of(_prune_subsumed(conjs))


def and_dnf(phi: Dnf, psi: Dnf, simplify: bool = True) -> Dnf:
    out: List[Conj] = []
    for c in phi.disjuncts:
        for d in psi.disjuncts:
            cd = c & d
            if not cd.is_false and is_sat(cd):
                out.append(cd)
    _check_cap(len(out))
    res = Dnf.of(out)
    return simplify_dnf(res) if simplify else res


def or_dnf(phi: Dnf, psi: Dnf, simplify: bool = True) -> Dnf:
    res = Dnf.of(phi.disjuncts + psi.disjuncts)
    _check_cap(len(res))
    return simplify_dnf(res) if simplify else res


def negate_dnf(phi: Dnf) -> Dnf:
    """Integer-exact complement by De Morgan and distribution."""
    result: List[Conj] = [TRUE_CONJ]
    for d in phi.disjuncts:
        if d.is_false:
            continue
        alts = [a for atom in d.atoms for a in _negated_atoms(atom)]
        if not alts:
            return FALSE
        new: List[Conj] = []
        for r in result:
            # a literal already implied by r leaves r unchanged and
            # subsumes every other branch
            if any(a in r.atoms for a in alts) or any(entails(r, a) for a in alts):
                new.append(r)
                continue
            for a in alts:
                ra = r & Conj((a,))
                if ra.is_false or not is_sat(ra):
                    continue
                new.append(ra)
        result = _prune_syntactic(new)
        if len(result) > 48:
            result = _prune_subsumed(result)
        _check_cap(len(result))
        if not result:
            return FALSE
    return simplify_dnf(Dnf.of(result))


def _covered(c: Conj, ds: Sequence[Conj]) -> bool:
    """Is ``c`` inside the union of ``ds``?  Splits ``c`` one disjunct at a time."""
    if c.is_false or not is_sat(c):
        return True
    live = []
    for d in ds:
        if conj_entails(c, d):
            return True
        cd = c & d
        if not cd.is_false and is_sat(cd):
            live.append(d)
    if not live:
        return False
    d, rest = live[0], live[1:]
    # c minus d as disjoint pieces: c & a1 & ... & a(k-1) & not ak
    prefix = c
    for a in d.atoms:
        if entails(prefix, a):
            continue
        for na in _negated_atoms(a):
            if not _covered(prefix & Conj((na,)), rest):
                return False
        prefix = prefix & Conj((a,))
    return True


def dnf_entails(phi: Dnf, psi: Dnf) -> bool:
    """``phi |= psi``: every disjunct of phi lies in the union of psi's."""
    if phi.is_false or psi.is_true:
        return True
    return all(_covered(c, psi.disjuncts) for c in phi.disjuncts)


def dnf_equiv(phi: Dnf, psi: Dnf) -> bool:
    return dnf_entails(phi, psi) and dnf_entails(psi, phi)


# -- rendering --------------------------------------------------------------

def var_order_key(order: Optional[Sequence[str]] = None):
    """Sort key: declaration order of the base name, then unprimed before primed."""
    idx = {v: i for i, v in enumerate(order or ())}

    def key(v: str):
        base = v.rstrip("'~")
        suffix = len(v) - len(base)
        return (idx.get(base, len(idx)), base, suffix, v)
    return key


def render_expr(e: LinExpr, order: Optional[Sequence[str]] = None) -> str:
    key = var_order_key(order)
    parts: List[str] = []
    for v, c in sorted(e.coeffs, key=lambda vc: key(vc[0])):
        mag = abs(c)
        term = v if mag == 1 else f"{mag}*{v}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    if e.const or not parts:
        if not parts:
            parts.append(str(e.const))
        else:
            parts.append(f"+ {e.const}" if e.const > 0 else f"- {-e.const}")
    return " ".join(parts)


def render_atom(a: Atom, order: Optional[Sequence[str]] = None) -> str:
    if a.is_false:
        return "false"
    return f"{render_expr(a.expr, order)} {'>=' if a.op == GEQ else '='} 0"


def render_conj(c: Conj, order: Optional[Sequence[str]] = None) -> str:
    if c.is_false:
        return "false"
    if not c.atoms:
        return "true"
    return " && ".join(sorted(render_atom(a, order) for a in c.atoms))


def render_dnf(phi: Dnf, order: Optional[Sequence[str]] = None) -> str:
    if phi.is_false:
        return "false"
    if phi.is_true:
        return "true"
    parts = sorted(render_conj(c, order) for c in phi.disjuncts)
    if len(parts) == 1:
        return parts[0]
    return " || ".join(f"({p})" if " && " in p else p for p in parts)
