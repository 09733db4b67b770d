"""Empirical estimators for the classical normality notions on finite prefixes."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .automata import Dfa, bits_array, is_strongly_connected, trajectory_array
from .generators import Source, SourceSpec, generate, parse_source
from .measure import as_param, format_rational, mu_word, parse_rational
from .verify import classify, lemma1_threshold
from .words import Word, as_word

NOTIONS = ("p-distributed", "block", "caterpillar", "postnikov-admissible", "copeland-arithmetic")

DEFAULT_TOLERANCE = 0.05
LOOKBACK = 6  # convergence verdict compares N against N / 2**LOOKBACK


def read_prefix(source, n: int) -> Word:
    """First ``n`` symbols of a spec, spec string, open :class:`Source`, or literal word."""
    if isinstance(source, Source):
        return source.read(n)
    if isinstance(source, SourceSpec):
        out = generate(source, n)
    elif isinstance(source, str) and source and set(source) <= {"0", "1"}:
        out = source[:n]
    else:
        out = generate(parse_source(source), n)
    if len(out) < n:
        raise EOFError(f"source provides only {len(out)} of {n} symbols")
    return out


@dataclass
class FrequencyReport:
    notion: str
    targets: tuple[str, ...]
    schedule: tuple[int, ...]
    observed: tuple[float, ...]
    reference: float
    tolerance: float = DEFAULT_TOLERANCE
    lookback_deviation: float | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise ValueError("schedule must be strictly increasing")

    @property
    def deviations(self) -> tuple[float, ...]:
        return tuple(abs(o - self.reference) for o in self.observed)

    @property
    def final_deviation(self) -> float:
        return self.deviations[-1]

    @property
    def within_tolerance(self) -> bool:
        return self.final_deviation < self.tolerance and all(
            v < self.tolerance for v in self.extras.get("probe_deviations", {}).values())

    @property
    def converged(self) -> bool:
        """Final deviation under tolerance and no worse than at ``N / 2**6``."""
        if not self.within_tolerance:
            return False
        if self.lookback_deviation is None:
            return True
        return self.final_deviation <= self.lookback_deviation

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "observed", "reference", "deviation"])
        for N, o, d in zip(self.schedule, self.observed, self.deviations):
            w.writerow([N, repr(o), repr(self.reference), repr(d)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "notion": self.notion,
            "targets": list(self.targets),
            "schedule": list(self.schedule),
            "observed": list(self.observed),
            "reference": self.reference,
            "deviations": list(self.deviations),
            "final_deviation": self.final_deviation,
            "lookback_deviation": self.lookback_deviation,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "extras": self.extras,
        }, indent=2)


def _schedule(schedule) -> tuple[int, ...]:
    if isinstance(schedule, int):
        schedule = (schedule,)
    sched = tuple(int(N) for N in schedule)
    if not sched or sched[0] < 1:
        raise ValueError("schedule must be nonempty with positive entries")
    return sched


def _lookback(N: int) -> int | None:
    M = N >> LOOKBACK
    return M if M >= 1 else None


def _occurrence_starts(bits: np.ndarray, target: Word) -> np.ndarray:
    """Indicator over start positions ``j`` (0-based) of ``target`` in ``bits``."""
    k = len(target)
    n = len(bits)
    if n < k:
        return np.zeros(0, dtype=bool)
    hit = np.ones(n - k + 1, dtype=bool)
    for i, ch in enumerate(target):
        hit &= bits[i:n - k + 1 + i] == (ch == "1")
    return hit


def _window_counts(bits, target, points):
    # occurrences fully inside the length-N prefix, for each N in points
    starts = np.concatenate([[0], np.cumsum(_occurrence_starts(bits, target))])
    k = len(target)
    return [int(starts[max(N - k + 1, 0)]) for N in points]


def freq_word(source, target: Word, schedule, p=Fraction(1, 2),
              tolerance: float = DEFAULT_TOLERANCE) -> FrequencyReport:
    """Occurrences of ``target`` in the length-``N`` prefix divided by ``N``."""
    target = as_word(target)
    if not target:
        raise ValueError("empty pattern")
    sched = _schedule(schedule)
    bits = bits_array(read_prefix(source, sched[-1]))
    look = _lookback(sched[-1])
    points = list(sched) + ([look] if look else [])
    counts = _window_counts(bits, target, points)
    ref = float(mu_word(p, target))
    obs = tuple(c / N for c, N in zip(counts, points))
    return FrequencyReport("p-distributed", (target,), sched, obs[:len(sched)], ref, tolerance,
                           abs(obs[-1] - ref) if look else None)


def freq_caterpillar(source, target: Word, schedule, p=Fraction(1, 2),
                     tolerance: float = DEFAULT_TOLERANCE) -> FrequencyReport:
    """Stride-1 windows: occurrences divided by the ``N - |target| + 1`` windows."""
    target = as_word(target)
    if not target:
        raise ValueError("empty pattern")
    k = len(target)
    sched = _schedule(schedule)
    if sched[0] < k:
        raise ValueError("schedule entries must be at least the target length")
    bits = bits_array(read_prefix(source, sched[-1]))
    look = _lookback(sched[-1])
    look = look if look and look >= k else None
    points = list(sched) + ([look] if look else [])
    counts = _window_counts(bits, target, points)
    ref = float(mu_word(p, target))
    obs = tuple(c / (N - k + 1) for c, N in zip(counts, points))
    return FrequencyReport("caterpillar", (target,), sched, obs[:len(sched)], ref, tolerance,
                           abs(obs[-1] - ref) if look else None)


def _block_values(bits: np.ndarray, n: int, k: int) -> np.ndarray:
    blocks = bits[: n * k].reshape(k, n).astype(np.int64)
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    return blocks @ weights


def freq_block(source, target: Word, schedule, p=Fraction(1, 2),
               tolerance: float = DEFAULT_TOLERANCE) -> FrequencyReport:
    """Fraction of the first ``k`` aligned ``|target|``-blocks equal to ``target``; schedule counts blocks."""
    target = as_word(target)
    if not target:
        raise ValueError("empty pattern")
    n = len(target)
    sched = _schedule(schedule)
    bits = bits_array(read_prefix(source, sched[-1] * n))
    hits = np.concatenate([[0], np.cumsum(_block_values(bits, n, sched[-1]) == int(target, 2))])
    look = _lookback(sched[-1])
    ref = float(mu_word(p, target))
    obs = tuple(int(hits[k]) / k for k in sched)
    return FrequencyReport("block", (target,), sched, obs, ref, tolerance,
                           abs(int(hits[look]) / look - ref) if look else None)


def freq_postnikov(source, w: Word, schedule, p=Fraction(1, 2),
                   tolerance: float = DEFAULT_TOLERANCE) -> FrequencyReport:
    """Frequency of the all-ones tuple among ``(a_{tm+r_1}, ..., a_{tm+r_k})``, ``t = 0, 1, ...``.

    ``m = |w|`` and ``r_1 < ... < r_k`` are the 1-based positions of the 1s in
    ``w``; the schedule counts tuples.
    """
    w = as_word(w)
    ones = [i for i, ch in enumerate(w) if ch == "1"]
    if not ones:
        raise ValueError("pattern word must contain at least one 1")
    m = len(w)
    sched = _schedule(schedule)
    T = sched[-1]
    bits = bits_array(read_prefix(source, T * m)).reshape(T, m)
    all_ones = bits[:, ones].all(axis=1)
    hits = np.concatenate([[0], np.cumsum(all_ones)])
    look = _lookback(T)
    ref = float(as_param(p).p1 ** len(ones))
    obs = tuple(int(hits[t]) / t for t in sched)
    return FrequencyReport("postnikov-admissible", (w,), sched, obs, ref, tolerance,
                           abs(int(hits[look]) / look - ref) if look else None)


def freq_copeland(source, r: int, n: int, schedule, p=Fraction(1, 2),
                  tolerance: float = DEFAULT_TOLERANCE) -> FrequencyReport:
    """1-frequency along ``a_r, a_{r+n}, a_{r+2n}, ...``; the schedule counts terms.

    ``extras`` carries a pairwise-independence probe: for every pair of
    residues ``i < j`` the joint frequency of ``(1, 1)`` minus the product of
    the marginal 1-frequencies, over the same number of terms.
    """
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    sched = _schedule(schedule)
    T = sched[-1]
    grid = bits_array(read_prefix(source, T * n)).reshape(T, n).astype(bool)
    col = grid[:, r - 1]
    hits = np.concatenate([[0], np.cumsum(col)])
    look = _lookback(T)
    ref = float(as_param(p).p1)
    obs = tuple(int(hits[t]) / t for t in sched)
    marg = grid.mean(axis=0)
    probe = {}
    for i in range(n):
        for j in range(i + 1, n):
            joint = float((grid[:, i] & grid[:, j]).mean())
            probe[f"{i + 1},{j + 1}"] = abs(joint - float(marg[i] * marg[j]))
    extras = {"r": r, "n": n, "probe_deviations": probe}
    return FrequencyReport("copeland-arithmetic", (f"{r}/{n}",), sched, obs, ref, tolerance,
                           abs(int(hits[look]) / look - ref) if look else None, extras)


# -- end-to-end selection statistics -----------------------------------------

@dataclass(frozen=True)
class BlockSelectionStats:
    block_length: int
    blocks: int
    L: int              # total selected length
    ell: int            # selected length from blocks outside D
    outside: int        # number of blocks outside D
    rho: Fraction       # overall selected frequency of the symbol
    theta: Fraction | None  # selected frequency inside D blocks
    symbol: str = "1"

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.ell, self.L)

    def rho_theta_ok(self) -> bool:
        return self.theta is None or abs(self.rho - self.theta) <= self.ratio

    def triangle_ok(self, p) -> bool:
        pa = as_param(p).prob(self.symbol)
        if self.theta is None:
            return True
        return abs(self.rho - pa) <= abs(self.rho - self.theta) + abs(self.theta - pa)


@dataclass
class TheoremDemo:
    stats: BlockSelectionStats
    report: FrequencyReport
    b: Fraction
    epsilon: Fraction
    selected: Word


def theorem_demo(A: Dfa, source, n: int, m: int, epsilon, p=Fraction(1, 2), b=None,
                 symbol: str = "1", tolerance: float = DEFAULT_TOLERANCE) -> TheoremDemo:
    """Blockwise selection statistics on the first ``n * m`` symbols.

    Each block is tested for membership in ``D_n^p(b, epsilon/2)``.  ``b``
    defaults to the threshold obtained with half the stationary accepting mass.
    """
    p = as_param(p)
    epsilon = parse_rational(epsilon)
    if not is_strongly_connected(A):
        raise ValueError("DFA is not strongly connected")
    if not p.positive:
        raise ValueError("Bernoulli parameter must be positive")
    if b is None:
        from .markov import min_accepting_mass
        c = min_accepting_mass(A, p)
        _, _, b = lemma1_threshold(A, p, c / 2)
    b = parse_rational(b)
    bits = bits_array(read_prefix(source, n * m))
    traj = trajectory_array(A, bits, A.start)
    picked = A.accepting_mask[traj[:-1]].reshape(m, n)
    sym = 1 if symbol == "1" else 0
    hits = picked & (bits.reshape(m, n) == sym)
    sel_len = picked.sum(axis=1)
    sel_sym = hits.sum(axis=1)
    in_d = classify(A, p, n, b, epsilon / 2).D[_block_values(bits, n, m)]
    L = int(sel_len.sum())
    if L == 0:
        raise ValueError("no symbols selected")
    ell = int(sel_len[~in_d].sum())
    inside = L - ell
    theta = Fraction(int(sel_sym[in_d].sum()), inside) if inside else None
    stats = BlockSelectionStats(n, m, L, ell, int((~in_d).sum()),
                                Fraction(int(sel_sym.sum()), L), theta, symbol)
    flat = bits[picked.reshape(-1)]
    selected = (flat + ord("0")).tobytes().decode("ascii")
    sched = tuple(sorted({min(1 << k, L) for k in range(4, L.bit_length() + 1)} | {L}))
    report = freq_word(selected, symbol, sched, p, tolerance)
    return TheoremDemo(stats, report, b, epsilon, selected)
