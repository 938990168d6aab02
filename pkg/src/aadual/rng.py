"""Seeded splitmix64 generator.

A tiny, fully specified 64-bit PRNG so that every verification run is
reproducible bit-for-bit from its seed, independent of numpy's generator
evolution.  The output for seed 0 is frozen in tests/golden/.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream with uniform / normal / complex helpers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def normal(self) -> float:
        # Box-Muller; u1 bounded away from 0 by the 53-bit grid offset
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def complex_normal(self) -> complex:
        return complex(self.normal(), self.normal()) / math.sqrt(2.0)

    def integers(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        span = hi - lo
        return lo + self.next_u64() % span
