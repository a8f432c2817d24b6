"""Exact rational simplex over bounded variables.

General-form tableau in the style of Dutertre and de Moura: every row
introduces a slack ``s = a . x`` whose bounds carry the constant, original
variables are free. Bland's rule (smallest variable index) for both the
feasibility check and the optimisation phase, so the procedure always
terminates. Arithmetic is exact rationals (gmpy2 ``mpq`` when available, else
``fractions.Fraction``); no floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

Row = Tuple[Mapping[str, int], int, bool]  # (coeffs, const, is_eq): a.x + c >= 0 / == 0

_MAX_PIVOTS = 100_000


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


class Tableau:
    def __init__(self) -> None:
        self.lower: Dict[str, Optional[Fraction]] = {}
        self.upper: Dict[str, Optional[Fraction]] = {}
        self.value: Dict[str, Fraction] = {}
        self.rows: Dict[str, Dict[str, Fraction]] = {}
        self.index: Dict[str, int] = {}
        self._slacks: Dict[Tuple[Tuple[str, Fraction], ...], str] = {}

    # -- construction -----------------------------------------------------

    def _var(self, v: str) -> None:
        if v not in self.index:
            self.index[v] = len(self.index)
            self.lower[v] = None
            self.upper[v] = None
            self.value[v] = Q(0)

    def _tighten(self, v: str, lo: Optional[Fraction], hi: Optional[Fraction]) -> None:
        if lo is not None and (self.lower[v] is None or lo > self.lower[v]):
            self.lower[v] = lo
        if hi is not None and (self.upper[v] is None or hi < self.upper[v]):
            self.upper[v] = hi
        l, u = self.lower[v], self.upper[v]
        if l is not None and u is not None and l > u:
            raise Infeasible

    def add(self, coeffs: Mapping[str, int], const, is_eq: bool) -> None:
        terms = sorted((v, Q(a)) for v, a in coeffs.items() if a != 0)
        const = Q(const)
        if not terms:
            if const < 0 or (is_eq and const != 0):
                raise Infeasible
            return
        for v, _ in terms:
            self._var(v)
        # a.x >= -c  (or == -c)
        if len(terms) == 1:
            v, a = terms[0]
            bound = -const / a
            if is_eq:
                self._tighten(v, bound, bound)
            elif a > 0:
                self._tighten(v, bound, None)
            else:
                self._tighten(v, None, bound)
            return
        # share a slack between parallel rows; orient so the lead coeff is 1
        lead = terms[0][1]
        key = tuple((v, a / lead) for v, a in terms)
        bound = -const / lead
        s = self._slacks.get(key)
        if s is None:
            s = f"$s{len(self._slacks)}"
            self._slacks[key] = s
            self._var(s)
            # nonbasic values are all zero at construction, so the slack is too
            self.rows[s] = {v: a for v, a in key}
            self._refresh_row_value(s)
        if is_eq:
            self._tighten(s, bound, bound)
        elif lead > 0:
            self._tighten(s, bound, None)
        else:
            self._tighten(s, None, bound)

    def _refresh_row_value(self, b: str) -> None:
        self.value[b] = sum((a * self.value[v] for v, a in self.rows[b].items()), Q(0))

    # -- pivoting ---------------------------------------------------------

    def _pivot(self, xi: str, xj: str) -> None:
        row = self.rows.pop(xi)
        a = row.pop(xj)
        new = {xi: 1 / a}
        for v, c in row.items():
            new[v] = -c / a
        for b, r in self.rows.items():
            c = r.pop(xj, None)
            if c is None:
                continue
            for v, d in new.items():
                nv = r.get(v, 0) + c * d
                if nv:
                    r[v] = nv
                else:
                    r.pop(v, None)
        self.rows[xj] = new

    def _pivot_and_update(self, xi: str, xj: str, v: Fraction) -> None:
        a = self.rows[xi][xj]
        theta = (v - self.value[xi]) / a
        self.value[xi] = v
        self.value[xj] += theta
        for b, r in self.rows.items():
            if b != xi and xj in r:
                self.value[b] += r[xj] * theta
        self._pivot(xi, xj)

    def _below(self, v: str) -> bool:
        return self.lower[v] is not None and self.value[v] < self.lower[v]

    def _above(self, v: str) -> bool:
        return self.upper[v] is not None and self.value[v] > self.upper[v]

    def _can_inc(self, v: str) -> bool:
        return self.upper[v] is None or self.value[v] < self.upper[v]

    def _can_dec(self, v: str) -> bool:
        return self.lower[v] is None or self.value[v] > self.lower[v]

    def check(self) -> None:
        # nonbasic variables start inside their bounds
        for v in self.index:
            if v in self.rows:
                continue
            if self._below(v) or self._above(v):
                target = self.lower[v] if self._below(v) else self.upper[v]
                delta = target - self.value[v]
                self.value[v] = target
                for b, r in self.rows.items():
                    if v in r:
                        self.value[b] += r[v] * delta
        for _ in range(_MAX_PIVOTS):
            bad = [b for b in self.rows if self._below(b) or self._above(b)]
            if not bad:
                return
            xi = min(bad, key=self.index.__getitem__)
            row = self.rows[xi]
            if self._below(xi):
                cands = [v for v, a in row.items()
                         if (a > 0 and self._can_inc(v)) or (a < 0 and self._can_dec(v))]
                target = self.lower[xi]
            else:
                cands = [v for v, a in row.items()
                         if (a < 0 and self._can_inc(v)) or (a > 0 and self._can_dec(v))]
                target = self.upper[xi]
            if not cands:
                raise Infeasible
            xj = min(cands, key=self.index.__getitem__)
            self._pivot_and_update(xi, xj, target)
        raise RuntimeError("simplex pivot limit exceeded")

    def minimize(self, objective: Mapping[str, Fraction]) -> Fraction:
        """Minimise ``objective . x`` from a feasible state; returns the optimum."""
        for v in objective:
            self._var(v)
        for _ in range(_MAX_PIVOTS):
            # reduced costs over nonbasic variables
            red: Dict[str, Fraction] = {}
            for v, c in objective.items():
                if not c:
                    continue
                if v in self.rows:
                    for w, a in self.rows[v].items():
                        red[w] = red.get(w, 0) + c * a
                else:
                    red[v] = red.get(v, 0) + c
            entering = None
            for v in sorted(red, key=self.index.__getitem__):
                d = red[v]
                if d < 0 and self._can_inc(v):
                    entering, direction = v, 1
                    break
                if d > 0 and self._can_dec(v):
                    entering, direction = v, -1
                    break
            if entering is None:
                return sum((Q(c) * self.value[v] for v, c in objective.items()),
                           Q(0))
            xj = entering
            # ratio test: largest step t >= 0 keeping every bound
            best_t = None
            best_var = None
            own = self.upper[xj] if direction > 0 else self.lower[xj]
            if own is not None:
                best_t = abs(own - self.value[xj])
                best_var = xj
            for b in sorted(self.rows, key=self.index.__getitem__):
                a = self.rows[b].get(xj)
                if not a:
                    continue
                rate = a * direction
                lim = self.upper[b] if rate > 0 else self.lower[b]
                if lim is None:
                    continue
                t = (lim - self.value[b]) / rate
                if best_t is None or t < best_t or (
                        t == best_t and best_var != xj
                        and self.index[b] < self.index[best_var]):
                    best_t, best_var = t, b
            if best_t is None:
                raise Unbounded
            if best_var == xj:
                step = best_t * direction
                self.value[xj] += step
                for b, r in self.rows.items():
                    if xj in r:
                        self.value[b] += r[xj] * step
            else:
                rate = self.rows[best_var][xj] * direction
                lim = self.upper[best_var] if rate > 0 else self.lower[best_var]
                self._pivot_and_update(best_var, xj, lim)
        raise RuntimeError("simplex pivot limit exceeded")

    def point(self, names: Iterable[str]) -> Dict[str, Fraction]:
        return {v: self.value.get(v, Q(0)) for v in names}


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _build(rows: Iterable[Row]) -> Tableau:
    t = Tableau()
    for coeffs, const, is_eq in rows:
        t.add(coeffs, const, is_eq)
    return t


def solve(rows: List[Row]) -> Optional[Dict[str, Fraction]]:
    """A rational point satisfying every row, or ``None`` if there is none."""
    try:
        t = _build(rows)
        t.check()
    except Infeasible:
        return None
    return {v: _frac(t.value[v]) for v in t.index if not v.startswith("$")}


class Region:
    """A feasible tableau kept around to answer many bound queries.

    Successive :meth:`lower_bound` calls warm-start from the vertex left by
    the previous one.
    """

    def __init__(self, rows: Iterable[Row]):
        try:
            self.tab: Optional[Tableau] = _build(rows)
            self.tab.check()
        except Infeasible:
            self.tab = None

    @property
    def feasible(self) -> bool:
        return self.tab is not None

    def point(self) -> Dict[str, Fraction]:
        t = self.tab
        return {v: t.value[v] for v in t.index if not v.startswith("$")}

    def lower_bound(self, objective: Mapping[str, int]) -> Optional[Fraction]:
        """Minimum of ``objective . x`` over the region; ``None`` if unbounded."""
        try:
            return self.tab.minimize({v: Q(c) for v, c in objective.items()})
        except Unbounded:
            return None


def minimize(rows: List[Row], objective: Mapping[str, int]):
    """Return ``(status, value, point)`` with status in infeasible/unbounded/optimal."""
    try:
        t = _build(rows)
        t.check()
    except Infeasible:
        return "infeasible", None, None
    try:
        val = t.minimize({v: Q(c) for v, c in objective.items()})
    except Unbounded:
        return "unbounded", None, None
    return "optimal", _frac(val), {v: _frac(t.value[v]) for v in t.index
                                   if not v.startswith("$")}
