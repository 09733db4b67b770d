"""SplitMix64, the pinned portable generator behind every seeded stream.

Output ``i`` (0-based) is ``mix(seed + (i + 1) * GAMMA mod 2**64)``, so a
stream of any length is computed in one vectorized pass and reproduces
bit-for-bit on every platform.
"""
from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self.index = 0

    def next(self) -> int:
        self.index += 1
        return mix64((self.seed + self.index * GAMMA) & MASK64)

    def take(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs as ``uint64``."""
        idx = np.arange(self.index + 1, self.index + 1 + n, dtype=np.uint64)
        self.index += n
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + idx * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def uniform53(self, n: int) -> np.ndarray:
        """Next ``n`` outputs reduced to their top 53 bits, as ``int64``."""
        return (self.take(n) >> np.uint64(11)).astype(np.int64)
