"""Deterministic 64-bit PRNG for synthetic data and initialization.

The generator is xoshiro256** (Blackman/Vigna) seeded through SplitMix64,
both implemented on plain Python integers so the stream is bit-identical
on every platform.  Uniform doubles are built from the top 53 bits of a
64-bit output; approximately-normal draws use a 12-uniform sum, which
involves only correctly-rounded IEEE additions and therefore stays
bit-identical across platforms (a transcendental-based transform such as
Box-Muller would inherit libm differences).
"""

from __future__ import annotations

import numpy as np

__all__ = ["SplitMix64", "Xoshiro256", "derive_seed"]

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Seed-expansion generator: state += 0x9E3779B97F4A7C15 per draw."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256:
    """xoshiro256** with the standard (s0..s3, rotl 7/45, *5, *9) constants."""

    def __init__(self, seed: int):
        sm = SplitMix64(seed)
        self.s = [sm.next_u64() for _ in range(4)]

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """Double in [0, 1) with 53-bit mantissa: (u64 >> 11) * 2^-53."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def normal(self) -> float:
        """Approximately standard normal: sum of 12 uniforms minus 6."""
        total = 0.0
        for _ in range(12):
            total += self.uniform()
        return total - 6.0

    def normals(self, count: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(count)], dtype=np.float64)

    def below(self, n: int) -> int:
        """Integer in [0, n).  Modulo bias is ~n/2^64, irrelevant here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n)."""
        idx = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx


def derive_seed(seed: int, *salt: int) -> int:
    """Stable sub-seed derivation so independent streams never collide."""
    sm = SplitMix64(seed)
    out = sm.next_u64()
    for s in salt:
        mixer = SplitMix64(out ^ (s & _MASK64))
        out = mixer.next_u64()
    return out
