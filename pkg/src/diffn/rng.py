"""Portable seeded PRNG: xoshiro256** seeded through splitmix64.

Streams are keyed by ``(seed, label, index)`` so that every trial of every
property owns an independent, reproducible stream:

    z = splitmix64_mix(seed) ^ fnv1a64(label)
    z = splitmix64_mix(z) ^ index
    state = four successive splitmix64 outputs starting from z

``below(m)`` draws uniformly from [0, m) by rejecting raw 64-bit outputs
>= 2**64 - (2**64 mod m) and reducing the rest mod m.  Any implementation
following these rules reproduces the same instance streams.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_mix(z: int) -> int:
    z = (z + _GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & MASK
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro256:
    """xoshiro256** (Blackman & Vigna)."""

    def __init__(self, seed: int = 0, label: str = "", index: int = 0):
        z = splitmix64_mix(seed & MASK) ^ fnv1a64(label)
        z = splitmix64_mix(z) ^ (index & MASK)
        state = []
        for _ in range(4):
            state.append(splitmix64_mix(z))
            z = (z + _GOLDEN) & MASK
        if not any(state):
            state[0] = 1
        self.s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK, 7) * 9) & MASK
        t = (s1 << 17) & MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def below(self, m: int) -> int:
        if m <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % m)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % m

    def between(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def coin(self) -> bool:
        return self.next_u64() >> 63 == 1

    def choice(self, seq):
        return seq[self.below(len(seq))]
