"""Portable seeded pseudo-randomness (splitmix64).

All randomized components (schedulers, adversaries, instance generators)
draw from this generator so that a (seed, call sequence) pair produces the
same stream on any platform or implementation. The algorithm is the
splitmix64 step: 64-bit state advances by the golden-ratio increment
0x9E3779B97F4A7C15, and each output is the finalizer
z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
z *= 0x94D049BB133111EB; z ^= z >> 31.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, *parts: int) -> int:
    """Derive a child seed from a base seed and integer path components."""
    h = seed & MASK64
    for p in parts:
        h = _mix((h + GOLDEN + (p & MASK64)) & MASK64)
    return h


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return _mix(self.state)

    def randrange(self, n: int) -> int:
        """Uniform-ish integer in [0, n) via the multiply-shift reduction."""
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        return (self.next_u64() * n) >> 64

    def random(self) -> float:
        """Float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def choice(self, xs):
        if not xs:
            raise ValueError("choice on empty sequence")
        return xs[self.randrange(len(xs))]

    def shuffle(self, xs: list) -> None:
        """In-place Fisher-Yates, descending index order."""
        for i in range(len(xs) - 1, 0, -1):
            j = self.randrange(i + 1)
            xs[i], xs[j] = xs[j], xs[i]
