"""Encoder chains for the RA / R(AD) / R(DA) families, dual pairs, and dense
GF(2) generator matrices.

Chains hold their operator list in matrix-product order (ops[-1] is the
repetition step and acts first), mirroring the generator written as
A M D M ... F_2.  A DualPair shares one permutation list between the primal
R(DA)^m chain and the dual R(AD)^m chain built from transposed kernels;
their generators satisfy H^T G = 0 exactly.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import rng
from .bitvec import BitVector, Permutation, n_words, pack_bits, unpack_bits
from .kernels import (
    Accumulate,
    AccumulateT,
    Derivative,
    DerivativeT,
    KernelOp,
    Permute,
    Repeat,
    apply_chain,
    apply_words,
    chain_len,
)

FAMILIES = ("RA", "RAD", "RDA")

MATERIALIZE_MAX_N = 1 << 14


@dataclass(frozen=True)
class CodeSpec:
    """Parameters selecting one code: family, block length, rounds, seed or perms."""

    family: str
    n: int
    m: int
    r: int = 2
    seed: Optional[int] = None
    perms: Optional[tuple[Permutation, ...]] = None
    transposed: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.family in ("RAD", "RDA") and self.r != 2:
            raise ValueError("RAD/RDA are rate-1/2 codes: r must be 2")
        if self.n < self.r or self.n % self.r:
            raise ValueError("n must be a positive multiple of r")
        if self.seed is None and self.perms is None:
            raise ValueError("either seed or explicit perms required")
        if self.perms is not None:
            want = self.num_perms
            if len(self.perms) != want:
                raise ValueError(f"{self.family} with m={self.m} needs {want} permutations")
            if any(p.n != self.n for p in self.perms):
                raise ValueError("permutation size must equal n")
            object.__setattr__(self, "perms", tuple(self.perms))

    @property
    def num_perms(self) -> int:
        return self.m if self.family == "RA" else 2 * self.m

    @property
    def k(self) -> int:
        return self.n // self.r

    def resolve_perms(self) -> tuple[Permutation, ...]:
        if self.perms is not None:
            return self.perms
        return tuple(
            Permutation.random(self.n, rng.derive_seed(self.seed, i))
            for i in range(self.num_perms)
        )

    def to_json(self) -> dict:
        out = {"family": self.family, "n": self.n, "m": self.m, "r": self.r,
               "transposed": self.transposed}
        if self.seed is not None:
            out["seed"] = int(self.seed)
        else:
            out["perms"] = [p.to_json() for p in self.perms]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CodeSpec":
        perms = data.get("perms")
        return cls(
            family=data["family"],
            n=int(data["n"]),
            m=int(data["m"]),
            r=int(data.get("r", 2)),
            seed=data.get("seed"),
            perms=tuple(Permutation.from_json(p) for p in perms) if perms else None,
            transposed=bool(data.get("transposed", False)),
        )


@dataclass(frozen=True)
class EncoderChain:
    """Ordered kernel ops (matrix order) mapping F_2^k -> F_2^n."""

    ops: tuple[KernelOp, ...]
    k: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if not self.ops or not isinstance(self.ops[-1], Repeat):
            raise ValueError("chain must start (rightmost factor) with a Repeat")
        if chain_len(list(self.ops), self.k) != self.n:
            raise ValueError("chain dimensions do not produce the declared block length")


def _round_ops(family: str, perms: Sequence[Permutation], transposed: bool) -> list[KernelOp]:
    """Ops of one chain in application order, excluding the leading Repeat."""
    acc: KernelOp = AccumulateT() if transposed else Accumulate()
    der: KernelOp = DerivativeT() if transposed else Derivative()
    ops: list[KernelOp] = []
    if family == "RA":
        for p in perms:
            ops += [Permute(p), acc]
    elif family == "RDA":
        for i in range(0, len(perms), 2):
            ops += [Permute(perms[i]), der, Permute(perms[i + 1]), acc]
    else:  # RAD
        for i in range(0, len(perms), 2):
            ops += [Permute(perms[i]), acc, Permute(perms[i + 1]), der]
    return ops


def build_chain(spec: CodeSpec) -> EncoderChain:
    perms = spec.resolve_perms()
    app_order = [Repeat(spec.r)] + _round_ops(spec.family, perms, spec.transposed)
    return EncoderChain(ops=tuple(reversed(app_order)), k=spec.k, n=spec.n)


@dataclass(frozen=True)
class DualPair:
    """R(DA)^m chain and its exact dual, sharing one permutation list: the
    primal applies D then A per round, the dual applies A^T then D^T, and the
    transposition argument gives H^T G = F_2^T F_2 = 0."""

    primal: EncoderChain
    dual: EncoderChain
    perms: tuple[Permutation, ...]
    n: int
    m: int
    seed: Optional[int] = None


def sample_pair(n: int, m: int, seed: int) -> DualPair:
    """Sample 2m permutations by seeded Fisher-Yates and build the dual pair.

    Deterministic in (n, m, seed); permutation i uses sub-seed derive_seed(seed, i).
    """
    if n < 4 or n % 2:
        raise ValueError("n must be even and >= 4")
    if m < 1:
        raise ValueError("m must be >= 1")
    spec = CodeSpec(family="RDA", n=n, m=m, seed=seed)
    perms = spec.resolve_perms()
    primal = build_chain(CodeSpec(family="RDA", n=n, m=m, perms=perms))
    dual = build_chain(CodeSpec(family="RAD", n=n, m=m, perms=perms, transposed=True))
    return DualPair(primal=primal, dual=dual, perms=perms, n=n, m=m, seed=seed)


def pair_from_perms(n: int, m: int, perms: Sequence[Permutation]) -> DualPair:
    primal = build_chain(CodeSpec(family="RDA", n=n, m=m, perms=tuple(perms)))
    dual = build_chain(CodeSpec(family="RAD", n=n, m=m, perms=tuple(perms), transposed=True))
    return DualPair(primal=primal, dual=dual, perms=tuple(perms), n=n, m=m)


def encode(chain: EncoderChain, msg: BitVector) -> BitVector:
    """Codeword for msg; O(m n) bit operations."""
    if msg.n != chain.k:
        raise ValueError(f"message length {msg.n} != k={chain.k}")
    return apply_chain(list(chain.ops), msg)


def encode_words(chain: EncoderChain, words: np.ndarray, k: int) -> np.ndarray:
    """Batch encode packed (..., W_k) message words; returns (..., W_n) codeword words."""
    if k != chain.k:
        raise ValueError(f"message length {k} != k={chain.k}")
    n = k
    for op in reversed(chain.ops):
        words, n = apply_words(op, words, n)
    return words


@dataclass(frozen=True)
class DenseMatrixF2:
    """Dense GF(2) matrix, rows packed into uint64 words (little-endian bit order)."""

    rows: int
    cols: int
    row_words: np.ndarray = field(repr=False)

    def __post_init__(self):
        rw = np.asarray(self.row_words, dtype=np.uint64)
        if rw.shape != (self.rows, n_words(self.cols)):
            raise ValueError("row_words shape does not match declared dimensions")
        rw = rw.copy()
        rw.flags.writeable = False
        object.__setattr__(self, "row_words", rw)

    @classmethod
    def from_bit_rows(cls, bits: np.ndarray) -> "DenseMatrixF2":
        bits = np.asarray(bits, dtype=np.uint8)
        return cls(rows=bits.shape[0], cols=bits.shape[1], row_words=pack_bits(bits))

    @classmethod
    def identity(cls, n: int) -> "DenseMatrixF2":
        return cls.from_bit_rows(np.eye(n, dtype=np.uint8))

    def to_bit_rows(self) -> np.ndarray:
        return unpack_bits(self.row_words, self.cols)

    def get(self, i: int, j: int) -> int:
        return int((self.row_words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def column_words(self) -> np.ndarray:
        """(cols, n_words(rows)) packing of the transpose."""
        return pack_bits(self.to_bit_rows().T)

    def transpose(self) -> "DenseMatrixF2":
        return DenseMatrixF2(rows=self.cols, cols=self.rows, row_words=self.column_words())

    def matvec(self, x: BitVector) -> BitVector:
        if x.n != self.cols:
            raise ValueError("matvec dimension mismatch")
        acc = (np.bitwise_count(self.row_words & x.words[None, :]).sum(axis=1) & 1).astype(np.uint8)
        return BitVector(pack_bits(acc), self.rows)

    def matmul(self, other: "DenseMatrixF2") -> "DenseMatrixF2":
        """self @ other over GF(2)."""
        if self.cols != other.rows:
            raise ValueError("matmul dimension mismatch")
        ocols = other.column_words()  # (other.cols, W)
        out = np.zeros((self.rows, other.cols), dtype=np.uint8)
        for j in range(other.cols):
            out[:, j] = np.bitwise_count(self.row_words & ocols[j][None, :]).sum(axis=1) & 1
        return DenseMatrixF2.from_bit_rows(out)

    def is_zero(self) -> bool:
        return not self.row_words.any()

    def to_text(self) -> str:
        rows = self.to_bit_rows()
        return "\n".join("".join("01"[b] for b in row) for row in rows)

    @classmethod
    def from_text(cls, text: str) -> "DenseMatrixF2":
        lines = [ln for ln in text.strip().splitlines() if ln]
        bits = np.array([[int(c) for c in ln] for ln in lines], dtype=np.uint8)
        return cls.from_bit_rows(bits)

    MAGIC = b"FDGM\x01\x00\x00\x00"

    def to_bytes(self) -> bytes:
        """16-byte header (magic, rows, cols) then rows packed to whole bytes each."""
        header = self.MAGIC + struct.pack("<II", self.rows, self.cols)
        bits = self.to_bit_rows()
        body = np.packbits(bits, axis=1, bitorder="little").tobytes()
        return header + body

    @classmethod
    def from_bytes(cls, blob: bytes) -> "DenseMatrixF2":
        if blob[:8] != cls.MAGIC:
            raise ValueError("bad magic in packed matrix")
        rows, cols = struct.unpack("<II", blob[8:16])
        per_row = (cols + 7) // 8
        body = np.frombuffer(blob[16:], dtype=np.uint8).reshape(rows, per_row)
        bits = np.unpackbits(body, axis=1, bitorder="little")[:, :cols]
        return cls.from_bit_rows(bits)


def materialize(chain: EncoderChain, max_n: int = MATERIALIZE_MAX_N) -> DenseMatrixF2:
    """Dense n x k generator; column j is encode(e_j).  The one quadratic object here."""
    if chain.n > max_n:
        raise ValueError(f"materialize refused: n={chain.n} exceeds cap {max_n}")
    ident = pack_bits(np.eye(chain.k, dtype=np.uint8))
    cols = encode_words(chain, ident, chain.k)  # (k, W_n): row j = codeword e_j
    col_bits = unpack_bits(cols, chain.n)  # (k, n)
    return DenseMatrixF2.from_bit_rows(col_bits.T)


def generator_column_words(chain: EncoderChain) -> np.ndarray:
    """(k, W_n) packed columns of the generator (each row one codeword)."""
    ident = pack_bits(np.eye(chain.k, dtype=np.uint8))
    return encode_words(chain, ident, chain.k)


def dual_product_check(pair: DualPair) -> tuple[bool, Optional[tuple[int, int]]]:
    """Exact H^T G == 0 test; returns (ok, first nonzero entry or None)."""
    g = generator_column_words(pair.primal)  # (k, W)
    h = generator_column_words(pair.dual)
    k = pair.primal.k
    for i in range(k):
        row = np.bitwise_count(h[i][None, :] & g).sum(axis=1) & 1
        nz = np.nonzero(row)[0]
        if nz.size:
            return False, (i, int(nz[0]))
    return True, None


def rank(mat: DenseMatrixF2) -> int:
    """GF(2) rank by row elimination on integer bitmasks."""
    rows = [int.from_bytes(w.tobytes(), "little") for w in mat.row_words]
    r = 0
    for col in range(mat.cols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        r += 1
        if r == len(rows):
            break
    return r


def systematic_form(mat: DenseMatrixF2) -> tuple[DenseMatrixF2, list[int]]:
    """Column-only Gauss-Jordan: returns an equivalent generator whose pivot rows
    form an identity, plus the pivot row list (pivot = first nonzero row).

    Column operations mix messages but preserve the column space, so the result
    generates the same code.  Rank deficiency means a broken chain upstream.
    """
    bits = mat.to_bit_rows()
    cols = [int.from_bytes(np.packbits(bits[:, j], bitorder="little").tobytes(), "little")
            for j in range(mat.cols)]
    pivots: list[int] = []
    for j in range(len(cols)):
        c = cols[j]
        if c == 0:
            raise RuntimeError("systematic_form: rank-deficient generator (kernel bug)")
        row = (c & -c).bit_length() - 1  # first nonzero row
        pivots.append(row)
        bit = 1 << row
        for j2 in range(len(cols)):
            if j2 != j and cols[j2] & bit:
                cols[j2] ^= c
    out = np.zeros((mat.rows, mat.cols), dtype=np.uint8)
    for j, c in enumerate(cols):
        arr = np.frombuffer(c.to_bytes((mat.rows + 7) // 8, "little"), dtype=np.uint8)
        out[:, j] = np.unpackbits(arr, bitorder="little")[: mat.rows]
    return DenseMatrixF2.from_bit_rows(out), pivots
