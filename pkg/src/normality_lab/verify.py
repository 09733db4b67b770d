"""Exhaustive construction and exact measurement of the D/E/G/H/F/R word sets.

All 2**n words of a given length are handled at once: word ``i`` is the
big-endian binary expansion of ``i``.  Membership is decided with integer
arithmetic only, and measures are exact because the Bernoulli measure of a
word depends only on its number of ones.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .automata import Dfa, all_dfas, is_strongly_connected, random_dfa, toggle_dfa, rotator_dfa, \
    random_strongly_connected_dfa
from .markov import induce_matrix, min_accepting_mass, period
from .measure import BernoulliParam, as_param, format_rational, mu_set, parse_rational, \
    prefix_free_reduce
from .strategies import Strategy, dfa_strategy, outputs_all_words
from .words import Word, words_up_to

DEFAULT_CAP = 22


def worker_count() -> int:
    env = os.environ.get("NORMALITY_LAB_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


class EnumerationCapError(ValueError):
    pass


def _check_cap(n: int, cap: int):
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap of {cap}")
    if n < 1:
        raise ValueError("n must be at least 1")


def popcounts(n: int) -> np.ndarray:
    words = np.arange(1 << n, dtype=np.int64)
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc += (words >> i) & 1
    return pc


def measure_mask(mask: np.ndarray, n: int, p, pc: np.ndarray | None = None) -> Fraction:
    """Exact measure of the set of length-``n`` words flagged in ``mask``."""
    p = as_param(p)
    if pc is None:
        pc = popcounts(n)
    hist = np.bincount(pc[mask], minlength=n + 1)
    return sum((int(h) * p.word_mass(k, n) for k, h in enumerate(hist) if h), Fraction(0))


def mask_to_words(mask: np.ndarray, n: int) -> frozenset[Word]:
    return frozenset(format(int(i), f"0{n}b") for i in np.flatnonzero(mask))


@dataclass
class SelectionTable:
    """Selected-length and ones-count of ``A_q[w]`` for every state ``q`` and word ``w``."""

    n: int
    lengths: np.ndarray  # shape (Q, 2**n)
    ones: np.ndarray     # shape (Q, 2**n)


def selection_table(A: Dfa, n: int, states: Sequence[int] | None = None) -> SelectionTable:
    states = range(A.states) if states is None else states
    words = np.arange(1 << n, dtype=np.int64)
    bits = [((words >> (n - 1 - i)) & 1) for i in range(n)]
    lengths = np.zeros((len(states), 1 << n), dtype=np.int64)
    ones = np.zeros((len(states), 1 << n), dtype=np.int64)
    for row, q in enumerate(states):
        state = np.full(1 << n, q, dtype=np.int64)
        for bit in bits:
            hit = A.accepting_mask[state]
            lengths[row] += hit
            ones[row] += hit & (bit == 1)
            state = A.delta_array[state, bit]
    return SelectionTable(n, lengths, ones)


def _short(b: Fraction, n: int, lengths: np.ndarray) -> np.ndarray:
    # |A_q[w]| <= b n, compared exactly
    return lengths * b.denominator <= b.numerator * n


def _deviates(p: BernoulliParam, eps: Fraction, lengths, ones) -> np.ndarray:
    # max_a |count_a / L - p(a)| >= eps; both symbols give the same deviation
    num, den = p.p1.numerator, p.p1.denominator
    diff = np.abs(ones * den - lengths * num)
    return (diff * eps.denominator >= eps.numerator * lengths * den) & (lengths > 0)


@dataclass
class Classification:
    n: int
    E_q: np.ndarray
    G_q: np.ndarray
    D_q: np.ndarray

    @property
    def E(self):
        return self.E_q.any(axis=0)

    @property
    def G(self):
        return self.G_q.any(axis=0)

    @property
    def D(self):
        return self.D_q.all(axis=0)


def classify(A: Dfa, p, n: int, b, epsilon, cap: int = DEFAULT_CAP,
             table: SelectionTable | None = None) -> Classification:
    _check_cap(n, cap)
    p, b, epsilon = as_param(p), parse_rational(b), parse_rational(epsilon)
    t = table if table is not None else selection_table(A, n)
    short = _short(b, n, t.lengths)
    dev = _deviates(p, epsilon, t.lengths, t.ones)
    return Classification(n, short, ~short & dev, ~short & ~dev)


@dataclass(frozen=True)
class SetSpec:
    kind: str           # E, G, D, H, F or R
    n: int
    b: Fraction = Fraction(1, 4)
    epsilon: Fraction = Fraction(1, 4)
    q: int | None = None
    symbol: str = "1"

    def __post_init__(self):
        object.__setattr__(self, "b", parse_rational(self.b))
        object.__setattr__(self, "epsilon", parse_rational(self.epsilon))
        if self.kind not in ("E", "G", "D", "H", "F", "R"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        if not 0 < self.b <= 1:
            raise ValueError("b must lie in (0, 1]")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.n < 1:
            raise ValueError("n must be at least 1")


def deviating_words_masks(p, b, epsilon, n: int) -> dict[int, np.ndarray]:
    """For each length ``l`` with ``b n < l <= n``, the words whose 1-frequency misses ``p`` by ``>= epsilon``."""
    p, b, epsilon = as_param(p), parse_rational(b), parse_rational(epsilon)
    out = {}
    for l in range(n + 1):
        if l * b.denominator <= b.numerator * n:
            continue
        pc = popcounts(l)
        out[l] = _deviates(p, epsilon, np.full_like(pc, l), pc)
    return out


def prefix_free_masks(masks: dict[int, np.ndarray]) -> dict[int, np.ndarray]:
    """Length-indexed membership masks with every word that has a proper prefix in the set removed."""
    if not masks:
        return {}
    top = max(masks)
    covered = np.zeros(1, dtype=bool)  # words of length l having a proper prefix in the set
    member = np.zeros(1, dtype=bool)
    out = {}
    for l in range(0, top + 1):
        if l > 0:
            parent = np.arange(1 << l) >> 1
            covered = covered[parent] | member[parent]
        member = masks.get(l, np.zeros(1 << l, dtype=bool))
        out[l] = member & ~covered
    return {l: m for l, m in out.items() if l in masks}


def enumerate_set(A: Dfa, p, spec: SetSpec, cap: int = DEFAULT_CAP):
    """``(words, measure)`` for the requested set; H uses ``A`` from its start state as the strategy."""
    p = as_param(p)
    n = spec.n
    _check_cap(n, cap)
    if spec.kind in ("F", "R"):
        masks = deviating_words_masks(p, spec.b, spec.epsilon, n)
        if spec.kind == "R":
            masks = prefix_free_masks(masks)
        words = frozenset().union(*(mask_to_words(m, l) for l, m in masks.items()))
        measure = sum((measure_mask(m, l, p) for l, m in masks.items()), Fraction(0))
        return words, measure
    if spec.kind == "H":
        mask = h_mask(dfa_strategy(A), p, spec.b, spec.epsilon, n, spec.symbol, cap)
        return mask_to_words(mask, n), measure_mask(mask, n, p)
    if spec.q is not None:
        t = selection_table(A, n, [spec.q])
        c = classify(A, p, n, spec.b, spec.epsilon, cap, table=t)
        mask = {"E": c.E_q, "G": c.G_q, "D": c.D_q}[spec.kind][0]
    else:
        c = classify(A, p, n, spec.b, spec.epsilon, cap)
        mask = {"E": c.E, "G": c.G, "D": c.D}[spec.kind]
    return mask_to_words(mask, n), measure_mask(mask, n, p)


def h_mask(S: Strategy, p, b, epsilon, n: int, symbol: str = "1",
           cap: int = DEFAULT_CAP) -> np.ndarray:
    """Words ``w`` of length ``n`` with ``|S(w)| > b n`` and the selected frequency of ``symbol`` off by ``>= epsilon``."""
    _check_cap(n, cap)
    p, b, epsilon = as_param(p), parse_rational(b), parse_rational(epsilon)
    if S.dfa is not None:
        t = selection_table(S.dfa, n, [S.dfa.start])
        lengths, ones = t.lengths[0], t.ones[0]
    else:
        outs = outputs_all_words(S, n)
        lengths = np.array([len(y) for y in outs], dtype=np.int64)
        ones = np.array([y.count("1") for y in outs], dtype=np.int64)
    # |p(a) - count_a/L| is the same for a = 0 and a = 1
    return ~_short(b, n, lengths) & _deviates(p, epsilon, lengths, ones)


# -- reports -----------------------------------------------------------------

@dataclass
class TrendReport:
    name: str
    params: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    verdicts: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def column(self, name):
        return [row[name] for row in self.rows]

    def _cell(self, v):
        if isinstance(v, Fraction):
            return format_rational(v)
        if isinstance(v, bool):
            return "true" if v else "false"
        if v is None:
            return ""
        return v

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns + ["verdict"])
        verdict = "pass" if self.passed else "fail"
        for row in self.rows:
            writer.writerow([self._cell(row.get(c)) for c in self.columns] + [verdict])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "report": self.name,
            "params": {k: self._cell(v) for k, v in self.params.items()},
            "rows": [{c: self._cell(row.get(c)) for c in self.columns} for row in self.rows],
            "verdicts": self.verdicts,
            "passed": self.passed,
        }
        return json.dumps(payload, indent=2)


# -- lemma checks ------------------------------------------------------------

@dataclass(frozen=True)
class Lemma3Check:
    mu_M: Fraction
    mu_R: Fraction
    holds: bool


def verify_lemma3(S: Strategy, F: Iterable[Word], n: int, p) -> Lemma3Check:
    """Preimage ``M_n = {w in {0,1}^n : S(w) in F}`` against the prefix-free reduction of ``F``."""
    p = as_param(p)
    F = frozenset(F)
    R = prefix_free_reduce(F)
    outs = outputs_all_words(S, n)
    mu_M = sum((p.word_mass(bin(i).count("1"), n)
                for i, y in enumerate(outs) if y in F), Fraction(0))
    mu_R = mu_set(p, R)
    return Lemma3Check(mu_M, mu_R, mu_M <= mu_R)


def _resolve_d(A: Dfa, p, d):
    return period(induce_matrix(A, p)) if d is None else parse_rational(d)


def lemma1_threshold(A: Dfa, p, epsilon, d=None) -> tuple[Fraction, Fraction, Fraction]:
    """``(c, d, b)`` with ``b = (c - epsilon) / d``; ``d`` defaults to the chain period."""
    p, epsilon = as_param(p), parse_rational(epsilon)
    c = min_accepting_mass(A, p)
    if epsilon >= c:
        raise ValueError(f"epsilon exceeds stationary accepting mass c={format_rational(c)}")
    d = _resolve_d(A, p, d)
    return c, d, (c - epsilon) / d


def verify_lemma1(A: Dfa, p, epsilon, n_range: Sequence[int], d=None, tolerance=Fraction(1, 20),
                  cap: int = DEFAULT_CAP) -> TrendReport:
    p = as_param(p)
    if not p.positive:
        raise ValueError("Bernoulli parameter must be positive")
    for n in n_range:
        _check_cap(n, cap)
    c, d, b = lemma1_threshold(A, p, epsilon, d)
    report = TrendReport("lemma1", {"p": p.p1, "epsilon": parse_rational(epsilon), "c": c,
                                    "d": d, "b": b},
                         ["n", "measure", "per_state_sum", "union_bound_ok"])
    for n in sorted(n_range):
        pc = popcounts(n)
        cl = classify(A, p, n, b, Fraction(1), cap)
        mu = measure_mask(cl.E, n, p, pc)
        per_state = sum((measure_mask(m, n, p, pc) for m in cl.E_q), Fraction(0))
        report.rows.append({"n": n, "measure": mu, "per_state_sum": per_state,
                            "union_bound_ok": mu <= per_state})
    ms = report.column("measure")
    report.verdicts = {
        "union_bound": all(report.column("union_bound_ok")),
        "tail_decrease": ms[-1] <= ms[0],
        "final_small": ms[-1] <= parse_rational(tolerance),
    }
    return report


def chebyshev_bound(p, symbol: str, b, epsilon, n: int) -> Fraction | None:
    """``p(a)(1-p(a)) / (floor(b n) eps^2)``; ``None`` when ``floor(b n) = 0``."""
    p, b, epsilon = as_param(p), parse_rational(b), parse_rational(epsilon)
    ell = (b * n).numerator // (b * n).denominator
    if ell == 0:
        return None
    pa = p.prob(symbol)
    return pa * (1 - pa) / (ell * epsilon ** 2)


def printed_chebyshev_bound(p, symbol: str, b, epsilon, n: int) -> Fraction | None:
    """The squared-variance variant ``p(a)^2 (1-p(a))^2 / (floor(b n) eps^2)``, reported for comparison."""
    p, b, epsilon = as_param(p), parse_rational(b), parse_rational(epsilon)
    ell = (b * n).numerator // (b * n).denominator
    if ell == 0:
        return None
    pa = p.prob(symbol)
    return pa ** 2 * (1 - pa) ** 2 / (ell * epsilon ** 2)


def verify_lemma2(S: Strategy, p, b, epsilon, symbol: str, n_range: Sequence[int],
                  cap: int = DEFAULT_CAP) -> TrendReport:
    p, b, epsilon = as_param(p), parse_rational(b), parse_rational(epsilon)
    if not p.positive:
        raise ValueError("Bernoulli parameter must be positive")
    for n in n_range:
        _check_cap(n, cap)
    report = TrendReport("lemma2", {"strategy": str(S), "p": p.p1, "b": b, "epsilon": epsilon,
                                    "symbol": symbol},
                         ["n", "measure", "prefix_free_measure", "bound", "printed_bound",
                          "within_bound", "lemma3_ok"])
    for n in sorted(n_range):
        mask = h_mask(S, p, b, epsilon, n, symbol, cap)
        mu = measure_mask(mask, n, p)
        rmasks = prefix_free_masks(deviating_words_masks(p, b, epsilon, n))
        mu_r = sum((measure_mask(m, l, p) for l, m in rmasks.items()), Fraction(0))
        bound = chebyshev_bound(p, symbol, b, epsilon, n)
        report.rows.append({
            "n": n, "measure": mu, "prefix_free_measure": mu_r, "bound": bound,
            "printed_bound": printed_chebyshev_bound(p, symbol, b, epsilon, n),
            "within_bound": bound is None or mu <= bound,
            "lemma3_ok": mu <= mu_r,
        })
    ms = report.column("measure")
    report.verdicts = {
        "within_bound": all(report.column("within_bound")),
        "lemma3_link": all(report.column("lemma3_ok")),
        "tail_decrease": len(ms) < 2 or ms[-1] < ms[0] or ms[-1] == 0,
    }
    return report


def verify_mainclaim(A: Dfa, p, epsilon, n_range: Sequence[int], b=None, d=None,
                     cap: int = DEFAULT_CAP) -> TrendReport:
    """Exact D/E/G measures per ``n``; ``b`` defaults to the threshold from :func:`lemma1_threshold`."""
    p, epsilon = as_param(p), parse_rational(epsilon)
    if b is None:
        if not p.positive:
            raise ValueError("Bernoulli parameter must be positive")
        _, _, b = lemma1_threshold(A, p, epsilon, d)
    b = parse_rational(b)
    for n in n_range:
        _check_cap(n, cap)
    report = TrendReport("mainclaim", {"p": p.p1, "epsilon": epsilon, "b": b},
                         ["n", "mu_D", "mu_E", "mu_G", "mu_G_per_state_sum", "cover_ok",
                          "union_bound_ok"])
    for n in sorted(n_range):
        pc = popcounts(n)
        cl = classify(A, p, n, b, epsilon, cap)
        mu_d = measure_mask(cl.D, n, p, pc)
        mu_e = measure_mask(cl.E, n, p, pc)
        mu_g = measure_mask(cl.G, n, p, pc)
        g_sum = sum((measure_mask(m, n, p, pc) for m in cl.G_q), Fraction(0))
        report.rows.append({"n": n, "mu_D": mu_d, "mu_E": mu_e, "mu_G": mu_g,
                            "mu_G_per_state_sum": g_sum, "cover_ok": 1 - mu_d <= mu_e + mu_g,
                            "union_bound_ok": mu_g <= g_sum})
    ds = report.column("mu_D")
    report.verdicts = {
        "cover_inequality": all(report.column("cover_ok")),
        "union_bound": all(report.column("union_bound_ok")),
        "increasing": len(ds) < 2 or ds[-1] > ds[0] or ds[-1] == 1,
    }
    return report


@dataclass(frozen=True)
class PartitionCheck:
    n: int
    covers: bool
    disjoint: bool

    @property
    def ok(self):
        return self.covers and self.disjoint


def verify_partition(A: Dfa, p, b, epsilon, n: int, cap: int = DEFAULT_CAP) -> PartitionCheck:
    """``D | E | G`` is all of ``{0,1}^n`` and ``D`` misses ``E | G``."""
    cl = classify(A, p, n, b, epsilon, cap)
    D, E, G = cl.D, cl.E, cl.G
    return PartitionCheck(n, bool((D | E | G).all()), not bool((D & (E | G)).any()))


# -- catalogs ----------------------------------------------------------------

def set_catalog(random_count: int = 10, states: int = 3) -> list[tuple[str, Dfa]]:
    """Toggle, 3-state rotator, and seeded random strongly connected DFAs."""
    cat = [("toggle", toggle_dfa()), ("rotator3", rotator_dfa(3))]
    cat += [(f"random{states}-{s}", random_strongly_connected_dfa(s, states))
            for s in range(random_count)]
    return cat


def lemma3_strategy_catalog(random_count: int = 50, seed: int = 2024) -> list[tuple[str, Dfa]]:
    """Every 2-state DFA (both start states) plus seeded random 3-state DFAs."""
    cat = []
    for start in (0, 1):
        for i, A in enumerate(all_dfas(2, start)):
            cat.append((f"dfa2-s{start}-{i}", A))
    rng = np.random.default_rng(seed)
    for i in range(random_count):
        cat.append((f"dfa3-{i}", random_dfa(rng, 3)))
    return cat


def _short_output_codes(A: Dfa, n: int, max_len: int) -> np.ndarray:
    """Index of ``A[w]`` in ``words_up_to(max_len)`` for each word ``w``; -1 when longer."""
    size = 1 << n
    words = np.arange(size, dtype=np.int64)
    state = np.full(size, A.start, dtype=np.int64)
    length = np.zeros(size, dtype=np.int64)
    value = np.zeros(size, dtype=np.int64)
    for i in range(n):
        bit = (words >> (n - 1 - i)) & 1
        hit = A.accepting_mask[state] & (length <= max_len)
        value = np.where(hit, (value << 1) | bit, value)
        length = length + hit
        state = A.delta_array[state, bit]
    code = (1 << length) - 1 + value
    return np.where(length <= max_len, code, -1)


@dataclass
class Lemma3CatalogResult:
    checks: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def verify_lemma3_catalog(strategies: Sequence[tuple[str, Dfa]] | None = None,
                          max_f_word: int = 3, max_f_size: int = 4, n_max: int = 10,
                          ps: Sequence = (Fraction(1, 2), Fraction(1, 3))) -> Lemma3CatalogResult:
    """Exhaustive sweep of the preimage bound over every ``F`` of short words.

    Measures are scaled by ``den**N`` with ``N = max(n_max, max_f_word)`` so
    that every comparison is an exact integer comparison.
    """
    if strategies is None:
        strategies = lemma3_strategy_catalog()
    universe = words_up_to(max_f_word)
    subsets = [c for k in range(max_f_size + 1) for c in itertools.combinations(range(len(universe)), k)]
    fmat = np.zeros((len(subsets), len(universe)), dtype=np.int64)
    for row, c in enumerate(subsets):
        fmat[row, list(c)] = 1
    top = max(n_max, max_f_word)
    result = Lemma3CatalogResult(0)
    for p in ps:
        p = as_param(p)
        num, den = p.p1.numerator, p.p1.denominator
        scale = den ** top

        def scaled(ones, length):
            return num ** ones * (den - num) ** (length - ones) * den ** (top - length)

        word_mass = np.array([scaled(w.count("1"), len(w)) for w in universe], dtype=np.int64)
        r_mass = np.array([sum(word_mass[universe.index(w)]
                               for w in prefix_free_reduce(universe[i] for i in c))
                           for c in subsets], dtype=np.int64)

        def sweep(item):
            name, A = item
            bad = []
            for n in range(1, n_max + 1):
                codes = _short_output_codes(A, n, max_f_word)
                pc = popcounts(n)
                w_mass = np.array([scaled(k, n) for k in range(n + 1)], dtype=np.int64)[pc]
                keep = codes >= 0
                out_mass = np.zeros(len(universe), dtype=np.int64)
                np.add.at(out_mass, codes[keep], w_mass[keep])
                mu_m = fmat @ out_mass
                for row in np.flatnonzero(mu_m > r_mass):
                    bad.append((name, n, p.p1, [universe[i] for i in subsets[row]],
                                Fraction(int(mu_m[row]), scale), Fraction(int(r_mass[row]), scale)))
            return bad

        with ThreadPoolExecutor(worker_count()) as pool:
            for bad in pool.map(sweep, strategies):
                result.violations.extend(bad)
        result.checks += len(strategies) * n_max * len(subsets)
    return result
