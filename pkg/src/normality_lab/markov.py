"""Markov chain induced by a selector DFA reading Bernoulli-distributed input."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .automata import Dfa, is_strongly_connected
from .measure import as_param, format_rational, parse_rational
from .rng import SplitMix64


@dataclass(frozen=True)
class TransitionMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(parse_rational(x) for x in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"row {i} has {len(row)} entries, expected {n}")
            if any(x < 0 or x > 1 for x in row):
                raise ValueError(f"row {i} has entries outside [0, 1]")
            if sum(row) != 1:
                raise ValueError(f"row {i} sums to {sum(row)}, not 1")

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def to_json(self):
        return [[format_rational(x) for x in row] for row in self.rows]

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.rows])

    def support(self):
        return [[j for j, x in enumerate(row) if x > 0] for row in self.rows]


@dataclass(frozen=True)
class StationaryDistribution:
    pi: tuple[Fraction, ...]

    def __getitem__(self, i):
        return self.pi[i]

    def __len__(self):
        return len(self.pi)

    def to_json(self):
        return [format_rational(x) for x in self.pi]


@dataclass(frozen=True)
class VisitStats:
    counts: tuple[int, ...]
    n: int

    def frequencies(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(len(self.counts))
        return np.array(self.counts, dtype=float) / self.n


def induce_matrix(A: Dfa, p) -> TransitionMatrix:
    p = as_param(p)
    rows = []
    for q in range(A.states):
        row = [Fraction(0)] * A.states
        row[A.delta[q][0]] += p.p0
        row[A.delta[q][1]] += p.p1
        rows.append(tuple(row))
    return TransitionMatrix(tuple(rows))


def _strongly_connected(support) -> bool:
    n = len(support)

    def reach(adj):
        seen, stack = {0}, [0]
        while stack:
            for r in adj[stack.pop()]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return len(seen) == n

    rev = [[] for _ in range(n)]
    for i, js in enumerate(support):
        for j in js:
            rev[j].append(i)
    return reach(support) and reach(rev)


def is_irreducible(P: TransitionMatrix) -> bool:
    return _strongly_connected(P.support())


def period(P: TransitionMatrix) -> int:
    """Standard period: gcd of cycle lengths, via BFS levels."""
    if not is_irreducible(P):
        raise ValueError("period undefined: not irreducible")
    support = P.support()
    level = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in support[i]:
                if j not in level:
                    level[j] = level[i] + 1
                    nxt.append(j)
        frontier = nxt
    g = 0
    for i, js in enumerate(support):
        for j in js:
            g = math.gcd(g, level[i] + 1 - level[j])
    return g


def stationary(P: TransitionMatrix) -> StationaryDistribution:
    """Exact solution of ``pi P = pi`` with ``sum(pi) = 1`` by Gauss-Jordan over the rationals."""
    if not is_irreducible(P):
        raise ValueError("not irreducible")
    n = P.dimension
    # unknowns pi_0..pi_{n-1}; equations sum_i pi_i (P_ij - [i==j]) = 0 for j < n-1, plus sum = 1
    a = [[P.rows[i][j] - (1 if i == j else 0) for i in range(n)] + [Fraction(0)]
         for j in range(n - 1)]
    a.append([Fraction(1)] * n + [Fraction(1)])
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return StationaryDistribution(tuple(a[i][n] for i in range(n)))


def min_accepting_mass(A: Dfa, p) -> Fraction:
    """Smallest stationary probability among accepting states."""
    p = as_param(p)
    if not A.accepting:
        raise ValueError("empty accepting set")
    if not is_strongly_connected(A):
        raise ValueError("DFA is not strongly connected")
    if not p.positive:
        raise ValueError("Bernoulli parameter must be positive")
    pi = stationary(induce_matrix(A, p))
    return min(pi[q] for q in A.accepting)


def _thresholds(row) -> np.ndarray:
    # cumulative row probabilities scaled to 53-bit integers, rounded up
    cum = Fraction(0)
    out = []
    for x in row:
        cum += x
        out.append(-(-cum.numerator * (1 << 53) // cum.denominator))
    return np.array(out, dtype=np.int64)


def sample_path(P: TransitionMatrix, start: int, n: int, seed: int) -> np.ndarray:
    """States ``X_0 .. X_{n-1}`` of the chain started at ``start``.

    Step ``k`` draws the ``k``-th 53-bit SplitMix64 output ``u`` and moves to
    the first ``j`` with ``u < ceil(2^53 * sum_{i<=j} P[X_k][i])``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0 <= start < P.dimension:
        raise ValueError(f"invalid start state {start}")
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    u = SplitMix64(seed).uniform53(n - 1)
    # next-state lookup for every (state, draw) pair, then a sequential walk
    nxt = np.stack([np.searchsorted(_thresholds(row), u, side="right") for row in P.rows])
    nxt = np.minimum(nxt, P.dimension - 1)
    table = nxt.tolist()
    q = start
    walk = [q]
    for k in range(n - 1):
        q = table[q][k]
        walk.append(q)
    out[:] = walk
    return out


def simulate_trajectory(P: TransitionMatrix, start: int, n: int, seed: int) -> VisitStats:
    path = sample_path(P, start, n, seed)
    counts = np.bincount(path, minlength=P.dimension)
    return VisitStats(tuple(int(c) for c in counts), n)


def visit_stats(states, dimension: int) -> VisitStats:
    states = np.asarray(states, dtype=np.int64)
    counts = np.bincount(states, minlength=dimension)
    return VisitStats(tuple(int(c) for c in counts), len(states))
