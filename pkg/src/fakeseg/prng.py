"""Portable seeded random streams for plan generation.

Plans must regenerate byte-for-byte on any platform and interpreter, so the
planner does not use numpy's generators (whose streams are only pinned per
numpy version). Instead it uses SplitMix64, a tiny, fully specified 64-bit
generator (Steele, Lea & Flood 2014; the reference java.util.SplittableRandom
mixer), with per-video streams derived from FNV-1a hashes of the video id.

Bounded draws use rejection sampling to stay unbiased.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_T = TypeVar("_T")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


class SplitMix64:
    """SplitMix64 stream: state advances by the 64-bit golden ratio, outputs
    pass through the murmur-style finalizer. Period 2^64."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def randrange(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi)."""
        if hi <= lo:
            raise ValueError(f"empty range [{lo}, {hi})")
        return lo + self.below(hi - lo)

    def choice(self, seq: Sequence[_T]) -> _T:
        return seq[self.below(len(seq))]


def stream_for(seed: int, key: str) -> SplitMix64:
    """Independent per-key stream: FNV-1a of "<seed>/<key>" seeds SplitMix64."""
    return SplitMix64(fnv1a64(f"{seed}/{key}".encode("utf-8")))


def derive_seed(seed: int, key: str) -> int:
    """Stable 63-bit sub-seed for numpy generators keyed by (seed, key)."""
    return stream_for(seed, key).next_u64() >> 1
