"""Finite binary words: occurrence counting, prefix order, block decomposition.

Words are plain ``str`` objects over the characters ``'0'`` and ``'1'``.
Positions are 1-based in docstrings; Python slicing is used internally.
"""
from __future__ import annotations

from dataclasses import dataclass

Word = str

_BITS = frozenset("01")


def as_word(bits) -> Word:
    """Coerce ``bits`` (str or iterable of 0/1 ints) to a validated word."""
    if isinstance(bits, str):
        word = bits
    else:
        word = "".join(str(int(b)) for b in bits)
    if not _BITS.issuperset(word):
        raise ValueError(f"not a binary word: {word[:32]!r}")
    return word


def count_occurrences(pattern: Word, text: Word) -> int:
    """Number of (possibly overlapping) positions at which ``pattern`` occurs in ``text``."""
    if not pattern:
        raise ValueError("empty pattern")
    if len(pattern) == 1:
        return text.count(pattern)
    count = 0
    start = text.find(pattern)
    while start != -1:
        count += 1
        start = text.find(pattern, start + 1)
    return count


def is_prefix(u: Word, w: Word, strict: bool = False) -> bool:
    if strict and len(u) >= len(w):
        return False
    return w.startswith(u)


def is_proper_prefix(u: Word, w: Word) -> bool:
    return is_prefix(u, w, strict=True)


@dataclass(frozen=True)
class BlockView:
    """Consecutive length-``n`` blocks of ``source``; a trailing partial block is dropped."""

    source: Word
    block_length: int
    blocks: tuple[Word, ...]

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, r):
        return self.blocks[r]

    def joined(self) -> Word:
        return "".join(self.blocks)


def block_decompose(text: Word, n: int) -> BlockView:
    if n < 1:
        raise ValueError(f"block length must be positive, got {n}")
    k = len(text) // n
    blocks = tuple(text[r * n:(r + 1) * n] for r in range(k))
    return BlockView(text, n, blocks)


def all_words(n: int):
    """All words of length ``n`` in lexicographic order."""
    if n == 0:
        return [""]
    return [format(i, f"0{n}b") for i in range(1 << n)]


def words_up_to(n: int):
    """All words of length 0..n, shortest first."""
    out = []
    for k in range(n + 1):
        out.extend(all_words(k))
    return out
