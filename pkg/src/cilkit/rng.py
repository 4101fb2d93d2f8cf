"""Seeded, documented pseudo-random primitives.

Everything that must be reproducible across platforms and library versions
(task splits, projection matrices, per-job seeds, committed fixtures) is
derived from the splitmix64 generator below rather than from numpy's
generators, whose streams are not guaranteed stable across releases.

splitmix64: state advances by the 64-bit golden-gamma constant and each
output is the finalizer mix of the new state.  The stream is therefore
also addressable by counter, which is what the vectorized helpers use.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    """Derive a child seed from a parent seed and one or more indices.

    Chained splitmix64 steps; equal inputs give equal outputs on every
    platform.  Used for per-job seeds and per-component sub-seeds.
    """
    s = seed & MASK64
    for ix in indices:
        s = mix64((s + (int(ix) + 1) * GOLDEN_GAMMA) & MASK64)
    return s


class SplitMix64:
    """Sequential splitmix64 stream with unbiased bounded draws."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        return mix64(self._state)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection sampling (unbiased)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        threshold = (MASK64 + 1) - ((MASK64 + 1) % n)
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def u64_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Counter-addressed splitmix64 outputs, vectorized.

    Element ``i`` equals the ``offset + i + 1``-th output of
    ``SplitMix64(seed)``.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
        return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """float64 uniforms in (0, 1], one per counter position."""
    bits = u64_stream(seed, count, offset)
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


_CHUNK = 1 << 22


def normals(seed: int, count: int) -> np.ndarray:
    """float64 i.i.d. standard normals via Box-Muller on the counter stream.

    Pair ``k`` consumes counter positions ``2k`` and ``2k + 1`` and yields
    output positions ``2k`` (cosine branch) and ``2k + 1`` (sine branch).
    Chunked so large projection matrices do not triple peak memory.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    out = np.empty(count, dtype=np.float64)
    pos = 0
    while pos < count:
        n = min(_CHUNK, count - pos)
        pairs = (n + 1) // 2
        u = uniforms(seed, 2 * pairs, offset=pos)
        r = np.sqrt(-2.0 * np.log(u[0::2]))
        theta = (2.0 * np.pi) * u[1::2]
        block = np.empty(2 * pairs, dtype=np.float64)
        block[0::2] = r * np.cos(theta)
        block[1::2] = r * np.sin(theta)
        out[pos:pos + n] = block[:n]
        pos += n
    return out
