"""Bit-packed GF(2) vectors and permutations.

Coordinates are 0-indexed internally (the accompanying docs use 1-indexed
coordinates when quoting matrix definitions).  Coordinate i lives in word
i >> 6 at bit i & 63, so word values read least-significant-bit first.  All
bits beyond the declared length are kept at zero; every operation re-masks
the tail word.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import rng

_U64 = np.uint64


def n_words(n_bits: int) -> int:
    return (n_bits + 63) >> 6


def tail_mask(n_bits: int) -> int:
    t = n_bits & 63
    return (1 << t) - 1 if t else (1 << 64) - 1


def mask_tail(words: np.ndarray, n_bits: int) -> np.ndarray:
    words[..., -1] &= _U64(tail_mask(n_bits))
    return words


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a (..., n) array of 0/1 into (..., ceil(n/64)) uint64 words."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    nb = n_words(n) * 8  # bytes after padding
    packed = np.packbits(bits, axis=-1, bitorder="little")
    if packed.shape[-1] < nb:
        pad = np.zeros(bits.shape[:-1] + (nb - packed.shape[-1],), dtype=np.uint8)
        packed = np.concatenate([packed, pad], axis=-1)
    return np.ascontiguousarray(packed).view(np.uint64)


def unpack_bits(words: np.ndarray, n_bits: int) -> np.ndarray:
    """Inverse of pack_bits: (..., W) uint64 -> (..., n_bits) uint8 of 0/1."""
    bytes_ = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(bytes_, axis=-1, bitorder="little")
    return bits[..., :n_bits]


def popcount(words: np.ndarray) -> np.ndarray:
    """Total set bits along the last (word) axis."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


class BitVector:
    """Immutable packed vector in F_2^n.

    Text form: a contiguous 0/1 string whose first character is coordinate 1
    (in the 1-indexed convention of the docs).
    """

    __slots__ = ("words", "n")

    def __init__(self, words: np.ndarray, n: int):
        if n < 1:
            raise ValueError("BitVector length must be >= 1")
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if words.shape != (n_words(n),):
            raise ValueError(f"expected {n_words(n)} words for length {n}, got {words.shape}")
        mask_tail(words, n)
        words.flags.writeable = False
        self.words = words
        self.n = n

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(np.zeros(n_words(n), dtype=np.uint64), n)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVector":
        if not 0 <= i < n:
            raise ValueError("unit index out of range")
        w = np.zeros(n_words(n), dtype=np.uint64)
        w[i >> 6] = _U64(1) << _U64(i & 63)
        return cls(w, n)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        arr = np.fromiter((1 if b else 0 for b in bits), dtype=np.uint8)
        if arr.size == 0:
            raise ValueError("empty bit sequence")
        return cls(pack_bits(arr), arr.size)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError("bit string must be a nonempty run of 0/1")
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def random(cls, n: int, seed: int) -> "BitVector":
        return cls(rng.random_bits(n, seed), n)

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.n)

    def to_string(self) -> str:
        return "".join("01"[b] for b in self.to_bits())

    def weight(self) -> int:
        return int(popcount(self.words))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise ValueError("length mismatch in xor")
        return BitVector(self.words ^ other.words, self.n)

    def inner(self, other: "BitVector") -> int:
        """Standard inner product modulo 2."""
        if self.n != other.n:
            raise ValueError("length mismatch in inner product")
        return int(popcount(self.words & other.words)) & 1

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVector)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.words.tobytes()))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        s = self.to_string()
        if len(s) > 64:
            s = s[:61] + "..."
        return f"BitVector({s!r}, n={self.n})"


@dataclass(frozen=True)
class Permutation:
    """Bijection pi on [0, n); as a matrix, row i has its 1 in column pi(i)."""

    map: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.map, dtype=np.int64)
        n = arr.size
        if n < 1:
            raise ValueError("empty permutation")
        seen = np.zeros(n, dtype=bool)
        if arr.min() < 0 or arr.max() >= n:
            raise ValueError("permutation entries out of range")
        seen[arr] = True
        if not seen.all():
            raise ValueError("permutation map is not a bijection")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "map", arr)

    @property
    def n(self) -> int:
        return self.map.size

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64))

    @classmethod
    def random(cls, n: int, seed: int) -> "Permutation":
        return cls(rng.random_permutation(n, seed))

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(self.n, dtype=np.int64)
        return Permutation(inv)

    def to_json(self) -> list[int]:
        return [int(v) for v in self.map]

    @classmethod
    def from_json(cls, data: list[int]) -> "Permutation":
        return cls(np.asarray(data, dtype=np.int64))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and bool(np.array_equal(self.map, other.map))

    def __hash__(self) -> int:
        return hash(self.map.tobytes())
