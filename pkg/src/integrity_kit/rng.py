"""Portable seeded random numbers.

Every random decision in the toolkit (bootstrap draws, feature subsets,
stratified shuffles, synthetic respondents, scatter jitter) goes through
:class:`Rng`, a xoshiro256** generator whose 256-bit state is filled by
splitmix64.  Both algorithms are pure 64-bit integer arithmetic, so a given
seed produces the same stream on every platform and Python version.

Independent streams are derived with :func:`derive_seed`, which folds any
mix of integers and strings into a new 64-bit seed.  A forest, for example,
seeds tree ``t``'s bootstrap from ``derive_seed(seed, t)`` and its feature
sampling from ``derive_seed(seed, t, "feat")``.
"""
from __future__ import annotations

import functools
from typing import MutableSequence, Sequence, TypeVar

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

T = TypeVar("T")


def fnv1a64(data: bytes | str) -> int:
    """64-bit FNV-1a hash of ``data`` (strings are UTF-8 encoded)."""
    if isinstance(data, str):
        return _fnv1a64_str(data)
    return _fnv1a64_bytes(data)


@functools.lru_cache(maxsize=1 << 16)
def _fnv1a64_str(text: str) -> int:
    return _fnv1a64_bytes(text.encode("utf-8"))


def _fnv1a64_bytes(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix64(self.state)


def derive_seed(seed: int, *keys: int | str) -> int:
    """Fold ``keys`` into ``seed`` to get the seed of an independent stream."""
    h = _mix64((seed + GOLDEN_GAMMA) & MASK64)
    for key in keys:
        k = fnv1a64(key) if isinstance(key, str) else int(key) & MASK64
        h = _mix64(((h ^ k) + GOLDEN_GAMMA) & MASK64)
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Rng:
    """xoshiro256** seeded through splitmix64."""

    def __init__(self, seed: int = 0):
        sm = SplitMix64(seed)
        self._s = [sm.next_u64() for _ in range(4)]

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

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def integers(self, n: int) -> int:
        """Unbiased integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def integers_many(self, n: int, count: int) -> list[int]:
        """``count`` draws of :meth:`integers` (same stream, same values), with the generator inlined."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        s0, s1, s2, s3 = self._s
        out = []
        while len(out) < count:
            x = ((s1 * 5) & MASK64)
            x = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
            t = (s1 << 17) & MASK64
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
            if x < limit:
                out.append(x % n)
        self._s = [s0, s1, s2, s3]
        return out

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def choice(self, items: Sequence[T]) -> T:
        return items[self.integers(len(items))]

    def weighted_index(self, weights: Sequence[float]) -> int:
        total = float(sum(weights))
        if total <= 0:
            raise ValueError("weights must sum to a positive value")
        u = self.random() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                return i
        # float round-off can leave u == total; fall back to the last positive weight
        return max(i for i, w in enumerate(weights) if w > 0)

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.integers(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, n: int, k: int) -> list[int]:
        """``k`` distinct indices from ``range(n)``, returned sorted."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        for i in range(k):
            j = i + self.integers(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])
