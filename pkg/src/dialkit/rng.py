"""Portable seeded randomness.

Everything downstream (appearance sampling, state draws, style pools) runs on
SplitMix64 so that a master seed reproduces the exact same output on any
platform and in any host language.  The generator is fully specified here:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z XOR (z >> 31)

Floats in [0, 1) take the top 53 bits of one output word.  Per-sample seeds
are derived from (master_seed, index, role) with `derive_seed`, so samples can
be generated in parallel and in any order without changing the result.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """SplitMix64 finalizer: one avalanche round over a 64-bit word."""
    z = (x + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int, role: str) -> int:
    """Derive a stable per-sample seed from a master seed.

    The derivation is mix64 folded over the master seed, the sample index and
    the UTF-8 bytes of the role tag, in that order.  Distinct roles ("state",
    "appearance", "style", ...) give independent streams for one sample.
    """
    acc = mix64(master_seed & _MASK64)
    acc = mix64(acc ^ (index & _MASK64))
    for byte in role.encode("utf-8"):
        acc = mix64(acc ^ byte)
    return acc


class SplitMix64:
    """Sequential SplitMix64 stream seeded with a 64-bit value."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (unbiased)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            u = self.next_u64()
            if u <= limit:
                return u % n

    def sign(self) -> int:
        """Uniform draw from {-1, +1}."""
        return 1 if self.next_u64() & 1 else -1

    def choice(self, items):
        return items[self.randint(len(items))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
