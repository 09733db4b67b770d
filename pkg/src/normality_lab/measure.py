"""Bernoulli measure of words and finite word sets, in exact rational arithmetic."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .words import Word, is_proper_prefix

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"`` or an integer. Decimal notation is rejected on purpose."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL.match(str(text))
    if not m:
        raise ValueError(f"expected a rational 'num/den', got {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class BernoulliParam:
    """Probability ``p1`` of the symbol 1; ``p0 = 1 - p1``."""

    p1: Fraction

    def __post_init__(self):
        p1 = parse_rational(self.p1)
        if not 0 <= p1 <= 1:
            raise ValueError(f"p1 must lie in [0, 1], got {p1}")
        object.__setattr__(self, "p1", p1)

    @property
    def p0(self) -> Fraction:
        return 1 - self.p1

    @property
    def positive(self) -> bool:
        return 0 < self.p1 < 1

    def prob(self, symbol) -> Fraction:
        return self.p1 if str(symbol) == "1" else self.p0

    def word_mass(self, ones: int, length: int) -> Fraction:
        return self.p1 ** ones * self.p0 ** (length - ones)

    def __str__(self):
        return format_rational(self.p1)


def as_param(p) -> BernoulliParam:
    return p if isinstance(p, BernoulliParam) else BernoulliParam(parse_rational(p))


def mu_word(p, w: Word) -> Fraction:
    p = as_param(p)
    ones = w.count("1")
    return p.word_mass(ones, len(w))


def mu_set(p, words: Iterable[Word]) -> Fraction:
    p = as_param(p)
    return sum((mu_word(p, w) for w in set(words)), Fraction(0))


def prefix_free_reduce(words: Iterable[Word]) -> frozenset[Word]:
    """Drop every word that has a proper prefix in the set.

    The result is prefix-free and every original word has a prefix
    (possibly itself) in it.
    """
    members = set(words)
    keep = set()
    for w in members:
        if not any(w[:k] in members for k in range(len(w))):
            keep.add(w)
    return frozenset(keep)


def is_prefix_free(words: Iterable[Word]) -> bool:
    ws = list(set(words))
    return not any(is_proper_prefix(u, v) for u in ws for v in ws)
