"""Selection strategies: predicates on finite words.

A strategy picks input position ``j`` when the prefix of length ``j - 1``
satisfies it.  Strategies see only the prefix, never the symbol about to be
read, so "select exactly the 1s" is not expressible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .automata import Dfa, SelectionResult, select
from .words import Word, as_word


@dataclass(frozen=True)
class Strategy:
    decide: Callable[[Word], bool]
    kind: str = "custom"  # one of "dfa", "suffix", "custom"
    name: str = ""
    dfa: Dfa | None = None

    def __call__(self, word: Word) -> bool:
        return bool(self.decide(word))

    def __str__(self):
        return self.name or self.kind


def apply_strategy(S: Strategy, input: Word) -> SelectionResult:
    if S.dfa is not None:
        return select(S.dfa, input)
    picked, positions = [], []
    for j in range(1, len(input) + 1):
        if S(input[: j - 1]):
            picked.append(input[j - 1])
            positions.append(j)
    return SelectionResult("".join(picked), tuple(positions), ())


def selected(S: Strategy, word: Word) -> Word:
    return apply_strategy(S, word).selected


def suffix_strategy(v: Word) -> Strategy:
    """Select the symbol right after every occurrence of ``v``."""
    v = as_word(v)
    if not v:
        raise ValueError("empty suffix")
    return Strategy(lambda w: w.endswith(v), "suffix", f"suffix:{v}")


def dfa_strategy(A: Dfa, name: str = "") -> Strategy:
    return Strategy(A.accepts, "dfa", name or "dfa", dfa=A)


def predicate_strategy(pred: Callable[[Word], bool], name: str = "custom") -> Strategy:
    return Strategy(pred, "custom", name)


def everything() -> Strategy:
    return predicate_strategy(lambda w: True, "everything")


def nothing() -> Strategy:
    return predicate_strategy(lambda w: False, "nothing")


def even_length() -> Strategy:
    return predicate_strategy(lambda w: len(w) % 2 == 0, "even-length")


def naive_after_occurrence(v: Word, text: Word) -> tuple[int, ...]:
    """1-based positions immediately following an occurrence of ``v`` (reference scanner)."""
    k = len(v)
    return tuple(i + 1 for i in range(k, len(text)) if text[i - k:i] == v)


def outputs_all_words(S: Strategy, n: int) -> list[Word]:
    """``S(w)`` for every ``w`` of length ``n`` in lexicographic order.

    DFA strategies are run in one vectorized pass over all ``2**n`` words.
    """
    if S.dfa is None:
        return [selected(S, format(i, f"0{n}b") if n else "") for i in range(1 << n)]
    A = S.dfa
    words = np.arange(1 << n, dtype=np.int64)
    state = np.full(1 << n, A.start, dtype=np.int64)
    out = [[] for _ in range(1 << n)]
    pieces = np.zeros((1 << n, n), dtype=np.int8) - 1
    for i in range(n):
        bit = (words >> (n - 1 - i)) & 1
        hit = A.accepting_mask[state]
        pieces[hit, i] = bit[hit]
        state = A.delta_array[state, bit]
    for idx in range(1 << n):
        row = pieces[idx]
        out[idx] = "".join("1" if b == 1 else "0" for b in row if b >= 0)
    return out
