"""The five elementary linear operators over F_2 and their composition.

Word-parallel implementations acting on packed (..., W) uint64 arrays along
the last axis, so a batch of vectors costs the same numpy dispatch as one.
Conventions (0-indexed, with x_{-1} := 0 and x_n := 0):

    accumulate    y_i = x_0 ^ ... ^ x_i          (prefix sums mod 2)
    derivative    y_i = x_i ^ x_{i-1}            (inverse of accumulate)
    accumulate_t  y_i = x_i ^ ... ^ x_{n-1}      (suffix sums; transpose of A)
    derivative_t  y_i = x_i ^ x_{i+1}            (transpose of D)
    repeat(r)     y_{r*i+t} = x_i for t < r
    permute(pi)   y_i = x_{pi(i)}
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .bitvec import BitVector, Permutation, mask_tail, n_words, pack_bits

_U64 = np.uint64

_SPREAD_MASKS = [
    (_U64(16), _U64(0x0000FFFF0000FFFF)),
    (_U64(8), _U64(0x00FF00FF00FF00FF)),
    (_U64(4), _U64(0x0F0F0F0F0F0F0F0F)),
    (_U64(2), _U64(0x3333333333333333)),
    (_U64(1), _U64(0x5555555555555555)),
]


def accumulate_words(words: np.ndarray, n: int) -> np.ndarray:
    out = words.astype(np.uint64, copy=True)
    scratch = np.empty_like(out)
    for s in (1, 2, 4, 8, 16, 32):  # in-word prefix xor
        np.left_shift(out, _U64(s), out=scratch)
        out ^= scratch
    if out.shape[-1] > 1:
        # after the prefix pass, bit 63 of each word is that word's parity
        carries = out >> _U64(63)
        np.bitwise_xor.accumulate(carries, axis=-1, out=carries)
        mask = scratch  # reuse: whole-word flip where the running parity is odd
        mask[..., 0] = 0
        with np.errstate(over="ignore"):
            np.negative(carries[..., :-1], out=mask[..., 1:])  # 1 -> all-ones
        out ^= mask
    return mask_tail(out, n)


def accumulate_t_words(words: np.ndarray, n: int) -> np.ndarray:
    out = words.astype(np.uint64, copy=True)
    scratch = np.empty_like(out)
    for s in (1, 2, 4, 8, 16, 32):  # in-word suffix xor; tail zeros contribute nothing
        np.right_shift(out, _U64(s), out=scratch)
        out ^= scratch
    if out.shape[-1] > 1:
        # after the suffix pass, bit 0 of each word is that word's parity
        parities = np.ascontiguousarray(np.flip(out & _U64(1), axis=-1))
        np.bitwise_xor.accumulate(parities, axis=-1, out=parities)
        carries = np.flip(parities, axis=-1)
        mask = scratch
        mask[..., -1] = 0
        with np.errstate(over="ignore"):
            np.negative(carries[..., 1:], out=mask[..., :-1])
        out ^= mask
    return mask_tail(out, n)


def derivative_words(words: np.ndarray, n: int) -> np.ndarray:
    shifted = words << _U64(1)
    if words.shape[-1] > 1:
        shifted[..., 1:] |= words[..., :-1] >> _U64(63)
    out = words ^ shifted
    return mask_tail(out, n)


def derivative_t_words(words: np.ndarray, n: int) -> np.ndarray:
    shifted = words >> _U64(1)
    if words.shape[-1] > 1:
        shifted[..., :-1] |= words[..., 1:] << _U64(63)
    out = words ^ shifted
    return mask_tail(out, n)


def _spread_halfword(x: np.ndarray) -> np.ndarray:
    for shift, mask in _SPREAD_MASKS:
        x = (x | (x << shift)) & mask
    return x


def repeat_words(words: np.ndarray, n: int, r: int) -> np.ndarray:
    """Copy each of the n input bits to r consecutive output bits (length r*n)."""
    if r == 1:
        return mask_tail(words.astype(np.uint64, copy=True), n)
    if r == 2:
        lo = _spread_halfword(words & _U64(0xFFFFFFFF))
        hi = _spread_halfword(words >> _U64(32))
        out = np.empty(words.shape[:-1] + (2 * words.shape[-1],), dtype=np.uint64)
        out[..., 0::2] = lo | (lo << _U64(1))
        out[..., 1::2] = hi | (hi << _U64(1))
        return mask_tail(out[..., : n_words(2 * n)], 2 * n)
    from .bitvec import unpack_bits

    bits = unpack_bits(words, n)
    return pack_bits(np.repeat(bits, r, axis=-1))


def permute_words(words: np.ndarray, n: int, perm: np.ndarray) -> np.ndarray:
    """Gather y_i = x_{perm[i]} on packed words."""
    widx = (perm >> 6).astype(np.int64)
    bidx = (perm & 63).astype(np.uint64)
    bits = ((np.take(words, widx, axis=-1) >> bidx) & _U64(1)).astype(np.uint8)
    return pack_bits(bits)


@dataclass(frozen=True)
class Repeat:
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("repetition factor must be >= 1")


@dataclass(frozen=True)
class Permute:
    perm: Permutation


@dataclass(frozen=True)
class Accumulate:
    pass


@dataclass(frozen=True)
class Derivative:
    pass


@dataclass(frozen=True)
class AccumulateT:
    pass


@dataclass(frozen=True)
class DerivativeT:
    pass


KernelOp = Union[Repeat, Permute, Accumulate, Derivative, AccumulateT, DerivativeT]

_LENGTH_PRESERVING = (Accumulate, Derivative, AccumulateT, DerivativeT)


def out_len(op: KernelOp, in_len: int) -> int:
    """Output dimension of `op` on an input of dimension `in_len` (validates compatibility)."""
    if isinstance(op, Repeat):
        return in_len * op.r
    if isinstance(op, Permute):
        if op.perm.n != in_len:
            raise ValueError(f"permutation on {op.perm.n} coordinates applied to length {in_len}")
        return in_len
    if isinstance(op, _LENGTH_PRESERVING):
        return in_len
    raise TypeError(f"not a KernelOp: {op!r}")


def apply_words(op: KernelOp, words: np.ndarray, n: int) -> tuple[np.ndarray, int]:
    """Apply `op` to packed (..., W) words of length-n vectors; returns (words, new_n)."""
    m = out_len(op, n)
    if isinstance(op, Repeat):
        return repeat_words(words, n, op.r), m
    if isinstance(op, Permute):
        return permute_words(words, n, op.perm.map), m
    if isinstance(op, Accumulate):
        return accumulate_words(words, n), m
    if isinstance(op, Derivative):
        return derivative_words(words, n), m
    if isinstance(op, AccumulateT):
        return accumulate_t_words(words, n), m
    return derivative_t_words(words, n), m


def apply(op: KernelOp, x: BitVector) -> BitVector:
    """Apply one elementary operator to a vector."""
    words, m = apply_words(op, x.words, x.n)
    return BitVector(words, m)


def apply_chain(ops: list[KernelOp], x: BitVector) -> BitVector:
    """Apply a chain written in matrix-product order: ops[-1] acts first.

    chain_len(ops, k) gives the resulting dimension; a dimension clash at any
    stage raises ValueError naming the stage.
    """
    words, n = x.words, x.n
    for stage, op in enumerate(reversed(ops)):
        try:
            words, n = apply_words(op, words, n)
        except ValueError as e:
            raise ValueError(f"stage {stage} ({type(op).__name__}): {e}") from e
    return BitVector(words, n)


def chain_len(ops: list[KernelOp], in_len: int) -> int:
    """Output dimension of a matrix-ordered chain on an input of dimension in_len."""
    n = in_len
    for op in reversed(ops):
        n = out_len(op, n)
    return n
