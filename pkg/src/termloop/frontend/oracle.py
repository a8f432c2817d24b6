"""Bounded concrete execution of a loop relation.

Every integer state in the box ``[-B, B]^n`` is run through the relation.
Successors are enumerated exactly (equalities are solved, remaining free
primed variables are enumerated) inside a box widened by the largest
update magnitude; leaving the widened box or exceeding the step budget is
reported as ``BUDGET`` and never counts as evidence of non-termination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..lincons import EQ, Conj, prime
from ..relk import Rel

TERMINATED = "TERMINATED"
CYCLE = "CYCLE"
BUDGET = "BUDGET"

State = Tuple[int, ...]


@dataclass(frozen=True)
class OracleConfig:
    box: int = 4
    steps: int = 200

    def __post_init__(self):
        if self.box < 1 or self.steps < 1:
            raise ValueError("box radius and step budget must be positive")


@dataclass(frozen=True)
class Outcome:
    kind: str
    steps: Optional[int] = None

    def __str__(self):
        return f"{self.kind}({self.steps})" if self.kind == TERMINATED else self.kind


class _PathKernel:
    """Vectorised successor generation for one conjunctive path."""

    def __init__(self, vars: Sequence[str], rho: Conj):
        self.vars = list(vars)
        n = len(vars)
        cols = {v: i for i, v in enumerate(vars)}
        pcols = {prime(v): i for i, v in enumerate(vars)}
        # every atom as dense integer rows over (x, x')
        self.A = np.zeros((len(rho.atoms), 2 * n), dtype=np.int64)
        self.c = np.zeros(len(rho.atoms), dtype=np.int64)
        self.is_eq = np.zeros(len(rho.atoms), dtype=bool)
        for k, a in enumerate(rho.atoms):
            for v, q in a.expr.coeffs:
                j = cols[v] if v in cols else n + pcols[v]
                self.A[k, j] = q
            self.c[k] = a.expr.const
            self.is_eq[k] = a.op == EQ
        self.infeasible = any(a.is_false for a in rho.atoms)
        # Gauss-Jordan on primed columns of the equalities
        rows = [[Fraction(int(x)) for x in self.A[k]] + [Fraction(int(self.c[k]))]
                for k in range(len(rho.atoms)) if self.is_eq[k]]
        pivots: Dict[int, List[Fraction]] = {}
        r = 0
        for j in range(n):
            col = n + j
            piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            pr = rows[r]
            pr[:] = [x / pr[col] for x in pr]
            for i in range(len(rows)):
                if i != r and rows[i][col] != 0:
                    f = rows[i][col]
                    rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
            pivots[j] = pr
            r += 1
        self.free = [j for j in range(n) if j not in pivots]
        # x'_j = -(sum_i row[i] x_i + sum_free row[n+f] x'_f + const)
        self.det: List[Tuple[int, np.ndarray, np.ndarray, int, int]] = []
        for j, row in pivots.items():
            den = lcm(*(x.denominator for x in row))
            num = [-(x * den) for x in row]
            self.det.append((j,
                             np.array([int(num[i]) for i in range(n)], dtype=np.int64),
                             np.array([int(num[n + f]) for f in self.free], dtype=np.int64),
                             int(num[2 * n]), den))

    def magnitude(self, box: int) -> int:
        """Largest ``|x'_j - x_j|`` over determined updates from the box."""
        if self.free:
            return box
        best = 0
        for j, a, _, b, den in self.det:
            a = a.astype(object).copy()
            a[j] -= den
            best = max(best, -(-(sum(abs(int(x)) for x in a) * box + abs(b)) // den))
        return best

    def successors(self, S: np.ndarray, radius: int):
        """Pairs ``(row index into S, successor)`` for this path."""
        if self.infeasible or len(S) == 0:
            return np.zeros(0, dtype=np.int64), np.zeros((0, len(self.vars)), dtype=np.int64)
        n = len(self.vars)
        m = len(S)
        if self.free:
            grid = np.array(list(itertools.product(range(-radius, radius + 1),
                                                   repeat=len(self.free))), dtype=np.int64)
        else:
            grid = np.zeros((1, 0), dtype=np.int64)
        g = len(grid)
        src = np.repeat(np.arange(m), g)
        X = S[src]
        F = np.tile(grid, (m, 1))
        T = np.zeros((m * g, n), dtype=np.int64)
        ok = np.ones(m * g, dtype=bool)
        for k, f in enumerate(self.free):
            T[:, f] = F[:, k]
        for j, a, fcoef, b, den in self.det:
            num = X @ a + (F @ fcoef if len(self.free) else 0) + b
            ok &= num % den == 0
            T[:, j] = num // den
        XT = np.concatenate([X, T], axis=1)
        val = XT @ self.A.T + self.c
        ok &= np.all(np.where(self.is_eq, val == 0, val >= 0), axis=1)
        return src[ok], T[ok]


@dataclass
class OracleResult:
    vars: Tuple[str, ...]
    config: OracleConfig
    radius: int
    outcomes: Dict[State, Outcome]
    edges: Dict[State, List[State]] = field(default_factory=dict)
    cyclic: set = field(default_factory=set)

    def cycle_edges(self) -> List[Tuple[State, State]]:
        """Transitions lying on some concrete cycle."""
        out = []
        for s in self.cyclic:
            for t in self.edges.get(s, ()):
                if t in self.cyclic and self._same_scc(s, t):
                    out.append((s, t))
        return out

    def _same_scc(self, s, t) -> bool:
        return self._scc.get(s) is not None and self._scc.get(s) == self._scc.get(t)

    def count(self, kind: str) -> int:
        return sum(1 for o in self.outcomes.values() if o.kind == kind)

    def grid(self) -> np.ndarray:
        """Initial states as an ``(m, n)`` array, in sorted order."""
        return np.array(sorted(self.outcomes), dtype=np.int64).reshape(-1, len(self.vars))


def _as_rel(spec) -> Rel:
    return spec if isinstance(spec, Rel) else spec.to_rel()


def oracle_simulate(spec, oc: OracleConfig = OracleConfig(),
                    initial: Optional[Iterable[Sequence[int]]] = None) -> OracleResult:
    """Classify every initial state of the box (or the given ones)."""
    rel = _as_rel(spec)
    n = len(rel.vars)
    kernels = [_PathKernel(rel.vars, rho) for rho in rel.paths]
    B = oc.box
    radius = B + max([k.magnitude(B) for k in kernels] + [0])
    if initial is None:
        init = [tuple(p) for p in itertools.product(range(-B, B + 1), repeat=n)]
    else:
        init = [tuple(int(v) for v in p) for p in initial]

    edges: Dict[State, List[State]] = {}
    escapes: set = set()
    frontier = list(dict.fromkeys(init))
    seen = set(frontier)
    while frontier:
        S = np.array(frontier, dtype=np.int64).reshape(-1, n)
        succ: Dict[int, List[State]] = {}
        for k in kernels:
            idx, T = k.successors(S, radius)
            for i, t in zip(idx.tolist(), map(tuple, T.tolist())):
                succ.setdefault(i, []).append(t)
        nxt = []
        for i, s in enumerate(frontier):
            ts = list(dict.fromkeys(succ.get(i, [])))
            inside = [t for t in ts if max(map(abs, t)) <= radius]
            if len(inside) < len(ts):
                escapes.add(s)
            edges[s] = inside
            for t in inside:
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt

    scc = _tarjan(edges)
    comp_nodes: Dict[int, List[State]] = {}
    for s, c in scc.items():
        comp_nodes.setdefault(c, []).append(s)
    cyclic = set()
    for c, nodes in comp_nodes.items():
        if len(nodes) > 1 or nodes[0] in edges.get(nodes[0], ()):
            cyclic.update(nodes)

    # Tarjan numbers components in reverse topological order
    status: Dict[int, Outcome] = {}
    for c in sorted(comp_nodes):
        nodes = comp_nodes[c]
        if nodes[0] in cyclic:
            status[c] = Outcome(CYCLE)
            continue
        s = nodes[0]
        outs = [status[scc[t]] for t in edges[s]]
        if any(o.kind == CYCLE for o in outs):
            status[c] = Outcome(CYCLE)
        elif s in escapes or any(o.kind == BUDGET for o in outs):
            status[c] = Outcome(BUDGET)
        else:
            k = 1 + max((o.steps for o in outs), default=-1)
            status[c] = Outcome(TERMINATED, k) if k <= oc.steps else Outcome(BUDGET)
    res = OracleResult(rel.vars, oc, radius, {s: status[scc[s]] for s in init}, edges, cyclic)
    res._scc = scc
    return res


def _tarjan(edges: Dict[State, List[State]]) -> Dict[State, int]:
    """Iterative Tarjan; component ids come out in reverse topological order."""
    index: Dict[State, int] = {}
    low: Dict[State, int] = {}
    on_stack = set()
    stack: List[State] = []
    comp: Dict[State, int] = {}
    counter = 0
    ncomp = 0
    for root in edges:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = edges.get(v, [])
            recurse = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comp


def classify(spec, state: Sequence[int], oc: OracleConfig = OracleConfig()) -> Outcome:
    """Outcome for a single initial state."""
    return oracle_simulate(spec, oc, [state]).outcomes[tuple(state)]
