"""Reproducible binary sequence sources.

Every source is fully described by a :class:`SourceSpec` and can be reopened
from it, so independent consumers see the same symbols.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .measure import format_rational, parse_rational
from .rng import SplitMix64
from .words import Word, as_word

KINDS = ("champernowne", "periodic", "bernoulli-random", "literal-then-constant", "file")


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    pattern: str = ""
    p1: Fraction | None = None
    seed: int = 0
    head: str = ""
    bit: str = "0"
    path: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "periodic" and not as_word(self.pattern):
            raise ValueError("periodic source needs a nonempty pattern")
        if self.kind == "literal-then-constant":
            as_word(self.head)
            if self.bit not in ("0", "1"):
                raise ValueError(f"constant bit must be 0 or 1, got {self.bit!r}")

    def __str__(self):
        if self.kind == "champernowne":
            return "champernowne"
        if self.kind == "periodic":
            return f"periodic:{self.pattern}"
        if self.kind == "bernoulli-random":
            return f"random:{format_rational(self.p1)}:{self.seed}"
        if self.kind == "literal-then-constant":
            return f"literal:{self.head}:{self.bit}"
        return f"file:{self.path}"


def champernowne() -> SourceSpec:
    return SourceSpec("champernowne")


def periodic(pattern: Word) -> SourceSpec:
    return SourceSpec("periodic", pattern=pattern)


def literal_then_constant(head: Word, bit) -> SourceSpec:
    return SourceSpec("literal-then-constant", head=head, bit=str(bit))


def bernoulli_source(p1, seed: int) -> SourceSpec:
    p1 = parse_rational(p1)
    if not 0 < p1 < 1:
        raise ValueError(f"p1 must satisfy 0 < p1 < 1 (positive distribution), got {p1}")
    return SourceSpec("bernoulli-random", p1=p1, seed=int(seed))


def parse_source(text: str) -> SourceSpec:
    """Parse the CLI form: ``champernowne``, ``periodic:<bits>``,
    ``random:<num>/<den>:<seed>``, ``literal:<bits>:<bit>``, ``file:<path>``."""
    kind, _, rest = text.partition(":")
    if kind == "champernowne" and not rest:
        return champernowne()
    if kind == "periodic":
        return periodic(as_word(rest))
    if kind == "random":
        p, _, seed = rest.rpartition(":")
        if not p:
            raise ValueError(f"expected random:<num>/<den>:<seed>, got {text!r}")
        return bernoulli_source(parse_rational(p), int(seed))
    if kind == "literal":
        head, _, bit = rest.rpartition(":")
        return literal_then_constant(as_word(head), bit)
    if kind == "file" and rest:
        return SourceSpec("file", path=rest)
    raise ValueError(f"unrecognised source {text!r}")


class Source:
    """Stateful reader over a sequence; ``read(k)`` returns up to ``k`` more symbols."""

    def __init__(self, spec: SourceSpec):
        self.spec = spec
        self.position = 0
        self._buffer = ""
        self._counter = 0
        self._rng = None
        self._file_data = None
        if spec.kind == "bernoulli-random":
            self._rng = SplitMix64(spec.seed)
            p1 = spec.p1
            self._threshold = -(-p1.numerator * (1 << 53) // p1.denominator)
        elif spec.kind == "file":
            raw = Path(spec.path).read_text()
            self._file_data = as_word("".join(raw.split()))

    def read(self, k: int) -> Word:
        spec = self.spec
        start = self.position
        if spec.kind == "champernowne":
            out = self._read_champernowne(k)
        elif spec.kind == "periodic":
            m = len(spec.pattern)
            reps = (start % m + k) // m + 1
            out = (spec.pattern * reps)[start % m:start % m + k]
        elif spec.kind == "literal-then-constant":
            head = spec.head
            part = head[start:start + k]
            out = part + spec.bit * (k - len(part))
        elif spec.kind == "bernoulli-random":
            u = self._rng.uniform53(k)
            out = ((u < self._threshold).astype(np.uint8) + ord("0")).tobytes().decode("ascii")
        else:
            out = self._file_data[start:start + k]
        self.position += len(out)
        return out

    def _read_champernowne(self, k):
        # binary expansions of 0, 1, 2, ... concatenated
        buf = self._buffer
        parts = [buf]
        have = len(buf)
        i = self._counter
        while have < k:
            s = format(i, "b")
            parts.append(s)
            have += len(s)
            i += 1
        self._counter = i
        joined = "".join(parts)
        self._buffer = joined[k:]
        return joined[:k]

    def __iter__(self):
        while True:
            s = self.read(4096)
            if not s:
                return
            yield from (int(c) for c in s)


def open_source(spec) -> Source:
    if isinstance(spec, str):
        spec = parse_source(spec)
    return Source(spec)


def generate(spec, n: int) -> Word:
    """First ``n`` symbols of the sequence; shorter only for exhausted file sources."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return open_source(spec).read(n)
