"""Deterministic 64-bit PRNG used everywhere randomness is needed.

The generator is xoshiro256** with its four state words expanded from a
single 64-bit seed by splitmix64. Both algorithms are public, shift-based
and exactly reproducible in any language, so schedules and assignments
produced here can be re-derived bit-for-bit by ports:

    splitmix64(x):  x += 0x9E3779B97F4A7C15
                    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
                    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                    return z ^ (z >> 31)

    xoshiro256**:   result = rotl(s1 * 5, 7) * 9, then the usual
                    xor/shift state transition (Blackman & Vigna).

Bounded draws use rejection sampling so every value in [0, n) is equally
likely. Shuffles are Fisher-Yates from the top index down. All consumers
must document the order in which they draw.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (output, new_state)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), state


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** seeded via splitmix64 from a single 64-bit seed."""

    def __init__(self, seed: int):
        seed &= MASK64
        state = seed
        words = []
        for _ in range(4):
            out, state = splitmix64_next(state)
            words.append(out)
        self._s = words

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_below(self, n: int) -> int:
        """Unbiased draw from [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, iterating i = len-1 .. 1."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def weighted_index(self, weights: list[int]) -> int:
        """Pick index i with probability weights[i] / sum(weights).

        Weights are nonnegative integers; a single next_below(total) draw
        is mapped by walking the prefix sums in index order.
        """
        total = sum(weights)
        if total <= 0:
            raise ValueError("weights must sum to a positive value")
        x = self.next_below(total)
        acc = 0
        for i, w in enumerate(weights):
            acc += w
            if x < acc:
                return i
        raise AssertionError("unreachable")


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash over raw bytes."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return h


def blind_hash(seed: int, *parts: str) -> int:
    """64-bit hash of (seed, parts...) used for deterministic blinding.

    Defined as splitmix64 output of
    fnv1a64(utf8(str(seed) + "|" + "|".join(parts))), so any port can
    reproduce side orders exactly.
    """
    key = str(seed & MASK64) + "|" + "|".join(parts)
    out, _ = splitmix64_next(fnv1a64(key.encode("utf-8")))
    return out
