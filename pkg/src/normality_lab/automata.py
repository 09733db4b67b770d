"""Deterministic finite automata over {0,1} used as selectors.

A selector started in state ``q`` picks input symbol ``a_i`` exactly when the
state reached after reading ``a_1 ... a_{i-1}`` is accepting.  The empty
prefix counts: an accepting start state selects the first symbol.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .words import Word, as_word


class DfaFormatError(ValueError):
    """Raised for malformed DFA descriptions; the message names the offending field."""


@dataclass(frozen=True)
class Dfa:
    states: int
    delta: tuple[tuple[int, int], ...]
    start: int = 0
    accepting: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple((int(a), int(b)) for a, b in self.delta))
        object.__setattr__(self, "accepting", frozenset(int(q) for q in self.accepting))
        if not isinstance(self.states, int) or self.states < 1:
            raise DfaFormatError(f"states: must be a positive integer, got {self.states!r}")
        if len(self.delta) != self.states:
            raise DfaFormatError(
                f"delta: expected {self.states} rows, got {len(self.delta)}")
        for q, row in enumerate(self.delta):
            for b, r in enumerate(row):
                if not 0 <= r < self.states:
                    raise DfaFormatError(f"delta[{q}][{b}]: target {r} out of range")
        if not 0 <= self.start < self.states:
            raise DfaFormatError(f"start: {self.start} out of range")
        bad = [q for q in self.accepting if not 0 <= q < self.states]
        if bad:
            raise DfaFormatError(f"accepting: states {sorted(bad)} out of range")

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "states": self.states,
            "start": self.start,
            "accepting": sorted(self.accepting),
            "delta": [list(row) for row in self.delta],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "Dfa":
        if not isinstance(data, dict):
            raise DfaFormatError("top level: expected a JSON object")
        for key in ("states", "start", "accepting", "delta"):
            if key not in data:
                raise DfaFormatError(f"{key}: missing field")
        states = data["states"]
        if isinstance(states, bool) or not isinstance(states, int):
            raise DfaFormatError(f"states: expected integer, got {states!r}")
        start = data["start"]
        if isinstance(start, bool) or not isinstance(start, int):
            raise DfaFormatError(f"start: expected integer, got {start!r}")
        acc = data["accepting"]
        if not isinstance(acc, list) or not all(
                isinstance(q, int) and not isinstance(q, bool) for q in acc):
            raise DfaFormatError("accepting: expected a list of integers")
        delta = data["delta"]
        if not isinstance(delta, list):
            raise DfaFormatError("delta: expected a list of [to_on_0, to_on_1] rows")
        for q, row in enumerate(delta):
            if (not isinstance(row, list) or len(row) != 2
                    or not all(isinstance(r, int) and not isinstance(r, bool) for r in row)):
                raise DfaFormatError(f"delta[{q}]: expected [to_on_0, to_on_1]")
        return cls(states, tuple(tuple(r) for r in delta), start, frozenset(acc))

    @classmethod
    def from_json(cls, text: str) -> "Dfa":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DfaFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Dfa":
        with open(path) as fh:
            return cls.from_json(fh.read())

    # -- helpers ---------------------------------------------------------
    def step(self, q: int, symbol) -> int:
        return self.delta[q][int(symbol)]

    def run(self, word: Word, from_state: int | None = None) -> int:
        q = self.start if from_state is None else from_state
        for ch in word:
            q = self.delta[q][ch == "1"]
        return q

    def accepts(self, word: Word, from_state: int | None = None) -> bool:
        return self.run(word, from_state) in self.accepting

    def with_start(self, q: int) -> "Dfa":
        return Dfa(self.states, self.delta, q, self.accepting)

    @cached_property
    def delta_array(self) -> np.ndarray:
        return np.array(self.delta, dtype=np.int64).reshape(self.states, 2)

    @cached_property
    def accepting_mask(self) -> np.ndarray:
        mask = np.zeros(self.states, dtype=bool)
        mask[list(self.accepting)] = True
        return mask

    @cached_property
    def _byte_tables(self):
        # states before each of the 8 bits of a byte (MSB first), per start state
        Q = self.states
        byte = np.arange(256)
        cur = np.repeat(np.arange(Q)[:, None], 256, axis=1)
        before = np.empty((Q, 256, 8), dtype=np.int64)
        for j in range(8):
            before[:, :, j] = cur
            bit = (byte >> (7 - j)) & 1
            cur = self.delta_array[cur, bit[None, :]]
        return before, cur

    def edges(self):
        for q, (a, b) in enumerate(self.delta):
            yield q, a
            yield q, b


def _check_state(A: Dfa, q: int) -> int:
    if not isinstance(q, (int, np.integer)) or not 0 <= q < A.states:
        raise ValueError(f"invalid state id {q!r} for a {A.states}-state DFA")
    return int(q)


def bits_array(word: Word) -> np.ndarray:
    return np.frombuffer(word.encode("ascii"), dtype=np.uint8) - ord("0")


def trajectory_array(A: Dfa, bits: np.ndarray, from_state: int | None = None) -> np.ndarray:
    """States visited while reading ``bits``; length ``len(bits) + 1``.

    Element ``i`` is the state after the first ``i`` symbols.
    """
    q = A.start if from_state is None else _check_state(A, from_state)
    bits = np.asarray(bits, dtype=np.uint8)
    n = len(bits)
    out = np.empty(n + 1, dtype=np.int64)
    nbytes = n // 8
    if nbytes:
        before, after = A._byte_tables
        packed = np.packbits(bits[: nbytes * 8])
        after_l = after.tolist()
        starts = [0] * nbytes
        for i, v in enumerate(packed.tolist()):
            starts[i] = q
            q = after_l[q][v]
        out[: nbytes * 8] = before[np.array(starts), packed].reshape(-1)
    delta = A.delta
    pos = nbytes * 8
    for b in bits[pos:].tolist():
        out[pos] = q
        q = delta[q][b]
        pos += 1
    out[n] = q
    return out


@dataclass(frozen=True)
class SelectionResult:
    selected: Word
    selected_positions: tuple[int, ...]
    trajectory: tuple[int, ...]

    def __len__(self):
        return len(self.selected)


_VECTOR_THRESHOLD = 512


def select(A: Dfa, input: Word, from_state: int | None = None) -> SelectionResult:
    """Run ``A`` from ``from_state`` (default: its start) and collect the picked-out symbols.

    ``selected_positions`` are 1-based input positions.
    """
    q = A.start if from_state is None else _check_state(A, from_state)
    if len(input) >= _VECTOR_THRESHOLD:
        bits = bits_array(input)
        traj = trajectory_array(A, bits, q)
        hit = A.accepting_mask[traj[:-1]]
        idx = np.flatnonzero(hit)
        selected = (bits[idx] + ord("0")).tobytes().decode("ascii")
        return SelectionResult(selected, tuple((idx + 1).tolist()), tuple(traj.tolist()))
    acc = A.accepting
    delta = A.delta
    traj = [q]
    picked = []
    positions = []
    for i, ch in enumerate(input, start=1):
        if q in acc:
            picked.append(ch)
            positions.append(i)
        q = delta[q][ch == "1"]
        traj.append(q)
    return SelectionResult("".join(picked), tuple(positions), tuple(traj))


def picked_out(A: Dfa, word: Word, from_state: int | None = None) -> Word:
    return select(A, word, from_state).selected


def select_stream(A: Dfa, source, n_symbols: int, from_state: int | None = None,
                  chunk: int = 1 << 16) -> SelectionResult:
    """Selection over the first ``n_symbols`` of a stream.

    ``source`` is either an object with ``read(k) -> str`` (see
    :mod:`normality_lab.generators`) or any iterable of symbols.
    """
    if n_symbols < 0:
        raise ValueError("n_symbols must be nonnegative")
    q = A.start if from_state is None else _check_state(A, from_state)
    reader = _reader(source)
    consumed = 0
    sel_parts, pos_parts, traj_parts = [], [], [np.array([q])]
    while consumed < n_symbols:
        want = min(chunk, n_symbols - consumed)
        block = reader(want)
        if len(block) < want:
            raise EOFError(
                f"source exhausted after {consumed + len(block)} of {n_symbols} symbols")
        bits = bits_array(as_word(block))
        traj = trajectory_array(A, bits, q)
        idx = np.flatnonzero(A.accepting_mask[traj[:-1]])
        sel_parts.append((bits[idx] + ord("0")).tobytes().decode("ascii"))
        pos_parts.append(idx + 1 + consumed)
        traj_parts.append(traj[1:])
        q = int(traj[-1])
        consumed += want
    positions = np.concatenate(pos_parts) if pos_parts else np.array([], dtype=np.int64)
    return SelectionResult("".join(sel_parts), tuple(positions.tolist()),
                           tuple(np.concatenate(traj_parts).tolist()))


def _reader(source):
    if hasattr(source, "read"):
        return source.read
    it = iter(source)

    def read(k):
        out = []
        for _ in range(k):
            try:
                out.append(str(int(next(it))))
            except StopIteration:
                break
        return "".join(out)
    return read


# -- constructions -----------------------------------------------------------

def compose(A: Dfa, B: Dfa) -> Dfa:
    """Product selector ``C`` with ``C[w] == B[A[w]]`` for every word ``w``.

    B's coordinate is frozen while A sits in a non-accepting state and moves
    on the symbol read from an accepting A-state.  Pair ``(a, b)`` gets id
    ``a * B.states + b``.
    """
    nb = B.states
    delta = []
    for qa in range(A.states):
        for qb in range(nb):
            row = []
            for sym in (0, 1):
                ra = A.delta[qa][sym]
                rb = B.delta[qb][sym] if qa in A.accepting else qb
                row.append(ra * nb + rb)
            delta.append(tuple(row))
    accepting = frozenset(qa * nb + qb for qa in A.accepting for qb in B.accepting)
    return Dfa(A.states * nb, tuple(delta), A.start * nb + B.start, accepting)


def sliding_window_start(v: Word) -> Word:
    """Start window at distance exactly ``len(v)`` from ``v``.

    All symbols equal the complement of ``v[0]``, so no nonempty suffix of the
    start window is a prefix of ``v``.
    """
    c = "1" if v[0] == "0" else "0"
    return c * len(v)


def sliding_window_dfa(v: Word) -> Dfa:
    """DFA whose state is the last ``len(v)`` symbols read; accepting only at ``v``.

    States are the windows read as big-endian integers.  It selects exactly
    the symbol following each occurrence of ``v``.
    """
    v = as_word(v)
    if not v:
        raise ValueError("empty window pattern")
    k = len(v)
    mask = (1 << k) - 1
    delta = tuple((((s << 1) & mask), ((s << 1) & mask) | 1) for s in range(1 << k))
    return Dfa(1 << k, delta, int(sliding_window_start(v), 2), frozenset({int(v, 2)}))


# -- structure ---------------------------------------------------------------

def _adjacency(A: Dfa):
    succ = [set() for _ in range(A.states)]
    for q, r in A.edges():
        succ[q].add(r)
    return succ


def _reachable(succ, src):
    seen = {src}
    stack = [src]
    while stack:
        q = stack.pop()
        for r in succ[q]:
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def is_strongly_connected(A: Dfa) -> bool:
    succ = _adjacency(A)
    if len(_reachable(succ, 0)) != A.states:
        return False
    pred = [set() for _ in range(A.states)]
    for q, rs in enumerate(succ):
        for r in rs:
            pred[r].add(q)
    return len(_reachable(pred, 0)) == A.states


def every_cycle_hits_accepting(A: Dfa) -> bool:
    return max_accept_gap(A) is not None


def max_accept_gap(A: Dfa) -> int | None:
    """Longest run of consecutive non-accepting states on any path, or ``None`` if unbounded.

    ``None`` means some cycle avoids the accepting states.  Otherwise, from
    any start state, at most this many symbols in a row go unselected.
    """
    nonacc = [q for q in range(A.states) if q not in A.accepting]
    succ = {q: [r for r in set(A.delta[q]) if r not in A.accepting] for q in nonacc}
    longest: dict[int, int] = {}
    WHITE, GREY = 0, 1
    colour = {q: WHITE for q in nonacc}

    def visit(q):
        # iterative DFS computing longest path (in vertices) starting at q
        stack = [(q, iter(succ[q]))]
        colour[q] = GREY
        while stack:
            node, it = stack[-1]
            for r in it:
                if r in longest:
                    continue
                if colour[r] == GREY:
                    return False
                colour[r] = GREY
                stack.append((r, iter(succ[r])))
                break
            else:
                stack.pop()
                longest[node] = 1 + max((longest[r] for r in succ[node]), default=0)
        return True

    for q in nonacc:
        if q not in longest and not visit(q):
            return None
    return max(longest.values(), default=0)


# -- catalog -----------------------------------------------------------------

def toggle_dfa() -> Dfa:
    return Dfa(2, ((1, 1), (0, 0)), 0, frozenset({0}))


def rotator_dfa(k: int = 3) -> Dfa:
    return Dfa(k, tuple(((q + 1) % k, (q + 1) % k) for q in range(k)), 0, frozenset({0}))


def accept_all_dfa() -> Dfa:
    return Dfa(1, ((0, 0),), 0, frozenset({0}))


def accept_none_dfa() -> Dfa:
    return Dfa(1, ((0, 0),), 0, frozenset())


def sink_dfa() -> Dfa:
    """Two states, the second absorbing; not strongly connected."""
    return Dfa(2, ((1, 1), (1, 1)), 0, frozenset({0}))


def finite_selection_demo_dfa() -> Dfa:
    """Strongly connected selector that picks only the first symbol of ``1 0 0 0 ...``.

    Under the non-positive Bernoulli map with ``p(0) = 1`` that sequence is
    distributed, yet the selected subsequence is finite.
    """
    return Dfa(2, ((0, 1), (1, 0)), 0, frozenset({0}))


def random_dfa(rng: np.random.Generator, states: int) -> Dfa:
    delta = rng.integers(0, states, size=(states, 2)).tolist()
    acc = frozenset(int(q) for q in np.flatnonzero(rng.integers(0, 2, size=states)))
    return Dfa(states, tuple(map(tuple, delta)), 0, acc)


def random_strongly_connected_dfa(seed: int, states: int = 3) -> Dfa:
    """Rejection-sampled strongly connected DFA with a nonempty, proper accepting set."""
    rng = np.random.default_rng(seed)
    while True:
        A = random_dfa(rng, states)
        if A.accepting and len(A.accepting) < states and is_strongly_connected(A):
            return A


def all_dfas(states: int, start: int = 0) -> Iterable[Dfa]:
    """Every DFA on ``states`` states with the given start state."""
    import itertools
    rows = list(itertools.product(range(states), repeat=2))
    for delta in itertools.product(rows, repeat=states):
        for mask in range(1 << states):
            acc = frozenset(q for q in range(states) if mask >> q & 1)
            yield Dfa(states, delta, start, acc)
