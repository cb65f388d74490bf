"""Seeded, version-pinned randomness: a SplitMix64 counter stream and Fisher-Yates.

Everything downstream (permutation sampling, random messages, failure-rate
trials) draws from this module so that a (seed, purpose) pair maps to the same
bits on every platform and every library version.  SplitMix64 is counter-based:
output k of stream(seed) is mix64(seed + (k+1) * GAMMA), so blocks of any size
can be generated independently and vectorized.
"""
from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def mix64(x: int | np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer, vectorized over uint64 arrays."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _MIX1
        z = (z ^ (z >> _U64(27))) * _MIX2
        z = z ^ (z >> _U64(31))
    return z


def stream_u64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """`count` uint64 outputs of the SplitMix64 stream for `seed`, starting at `offset`."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = _U64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GAMMA
    return mix64(states)


def derive_seed(seed: int, *tags: int) -> int:
    """Stable sub-seed for an independent purpose (trial index, stream name, ...)."""
    s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    for t in tags:
        with np.errstate(over="ignore"):
            s = mix64(s + _GAMMA * _U64(t & 0xFFFFFFFFFFFFFFFF) + _GAMMA)
    return int(s)


def _bounded(raw: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Map uint64 draws to [0, bound) per element via the multiply-shift method.

    hi64(raw * bound) computed exactly in uint64 pieces; bound must be < 2**32.
    Bias is < bound / 2**64 per draw, negligible and deterministic.
    """
    b = bounds.astype(np.uint64)
    hi = raw >> _U64(32)
    lo = raw & _U64(0xFFFFFFFF)
    with np.errstate(over="ignore"):
        t = hi * b + ((lo * b) >> _U64(32))
    return (t >> _U64(32)).astype(np.int64)


def random_permutation(n: int, seed: int) -> np.ndarray:
    """Fisher-Yates permutation of [0, n) driven by the SplitMix64 stream for `seed`."""
    if n <= 0:
        raise ValueError("n must be positive")
    perm = np.arange(n, dtype=np.int64)
    if n == 1:
        return perm
    raw = stream_u64(seed, n - 1)
    bounds = np.arange(n, 1, -1, dtype=np.uint64)  # draw i picks j in [0, n-i)
    js = _bounded(raw, bounds)
    p = perm.tolist()
    for i in range(n - 1):
        j = i + int(js[i])
        p[i], p[j] = p[j], p[i]
    return np.asarray(p, dtype=np.int64)


def random_bits(n_bits: int, seed: int) -> np.ndarray:
    """Packed random bit vector: ceil(n_bits/64) uint64 words, tail bits zeroed."""
    n_words = (n_bits + 63) // 64
    words = stream_u64(seed, n_words)
    tail = n_bits % 64
    if tail:
        words[-1] &= _U64((1 << tail) - 1)
    return words
