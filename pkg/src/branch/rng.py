"""Deterministic PRNG used for percentage splits.

Partitions must be reproducible across machines, runs, and reimplementations,
so the generator is pinned down exactly rather than delegated to the host
language's `random` module:

* Stream: splitmix64. State is a 64-bit unsigned integer; each draw adds the
  constant 0x9E3779B97F4A7C15 (mod 2**64) and returns the mixed state
  ``z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27; z *= 0x94D049BB133111EB;
  z ^= z>>31``.
* Seeding: the user-supplied signed integer taken mod 2**64.
* Bounded draws: ``below(n) == next_uint64() % n``. The modulo bias is
  irrelevant at library scale and keeps the contract trivial to restate.
* Shuffle: in-place Fisher-Yates, iterating ``i`` from ``len-1`` down to 1
  and swapping with ``j = below(i + 1)``.

Any change to these rules changes every seeded partition and must be treated
as a breaking change.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n)."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        return self.next_uint64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this generator."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
