"""
Portable pseudo-random numbers for surrogate sampling.

Surrogate draws must be reproducible bit-for-bit on any platform and in any
language, so they do not go through numpy's generators. The procedure is
fully pinned here:

* **Generator**: xoshiro256** 1.0 (Blackman & Vigna), 64-bit output.
* **Seeding**: the four state words are the first four outputs of
  SplitMix64 started at the 64-bit seed.
* **Bounded integers** in ``[0, n)``: rejection sampling. Draw ``r``; accept
  when ``r >= (2**64 - n) % n`` and return ``r % n``.
* **Seed mixing** for ensembles: ``mix64(x)`` is one SplitMix64 step from
  state ``x``; a cell seed is
  ``mix64(mix64(mix64(master) ^ p) ^ replica)``.
"""

from __future__ import annotations

__all__ = ["MASK64", "mix64", "SplitMix64", "Xoshiro256StarStar", "derive_seed"]

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """One SplitMix64 output from state `x` (state advanced by the golden gamma)."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        out = mix64(self.state)
        self.state = (self.state + _GOLDEN) & MASK64
        return out


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator seeded through SplitMix64."""

    def __init__(self, seed: int | None = None, *, state=None):
        if state is not None:
            s = [int(v) & MASK64 for v in state]
            if len(s) != 4 or not any(s):
                raise ValueError("state must be four 64-bit words, not all zero")
        else:
            if seed is None:
                raise ValueError("seed or state is required")
            sm = SplitMix64(seed)
            s = [sm.next() for _ in range(4)]
        self.s0, self.s1, self.s2, self.s3 = s

    def next(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def bounded(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next()
            if r >= threshold:
                return r % n


def derive_seed(master_seed: int, p: int, replica: int) -> int:
    """Seed of ensemble cell ``(p, replica)``; independent of execution order."""
    return mix64(mix64(mix64(master_seed & MASK64) ^ (p & MASK64)) ^ (replica & MASK64))
