"""SplitMix64 stream used by every randomized routine in the package.

All experiments draw from this generator so results are bit-exact across
platforms and independent of numpy's generator versions.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_TWO64 = 1 << 64


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Seeded 64-bit stream.

    >>> rng = SplitMix64(0)
    >>> hex(rng.next_u64())
    '0xe220a8397b1dcdaf'
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return _mix(self.state)

    def next_u53(self) -> int:
        """Top 53 bits of the next output; ``u = next_u53() / 2**53``."""
        return self.next_u64() >> 11

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        # rejection sampling keeps the draw exactly uniform
        if n <= 0:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        limit = _TWO64 - (_TWO64 % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def derive_seed(base_seed: int, index: int) -> int:
    """The ``index``-th output (0-based) of ``SplitMix64(base_seed)``.

    Used for per-run and per-instance seeds, so a run count can grow without
    changing the seeds of earlier runs.
    """
    if index < 0:
        raise ValueError("index must be nonnegative")
    return _mix((base_seed + (index + 1) * GAMMA) & MASK64)
