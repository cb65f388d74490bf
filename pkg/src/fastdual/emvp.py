"""Correctness-only demo of the encrypted matrix-vector product sketch.

A client holds M (rows x l, l = n/2) and delegates M q to a server.  Offline,
it publishes M_hat = M Gs + R, where Gs is the k x n systematic generator of
the dual code (rows of M Gs are dual codewords) and R is a seeded
pseudorandom mask the client keeps.  Online, the query q is embedded into
F_2^n on the systematic pivot positions and masked with a fresh uniformly
random primal codeword c = encode(primal, r).

The server returns M' = M_hat q_hat.  Because every dual row is orthogonal
to c, M Gs q_hat = M Gs embed(q) = M q (the pivot rows of Gs^T form an
identity); the client removes R q_hat and is left with exactly M q.  This is
one consistent instantiation of the sketch: no noise, no security claims,
and the mask generator is a plain seeded stream, not a PRG with any hardness
property.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .bitvec import BitVector, n_words
from .codes import DenseMatrixF2, DualPair, encode, materialize, systematic_form


@dataclass(frozen=True)
class EmvpInstance:
    """Offline state: the public M_hat plus everything the client keeps secret."""

    pair: DualPair
    matrix: DenseMatrixF2  # client-side M (rows x l)
    m_hat: DenseMatrixF2  # public (rows x n)
    mask_rows: np.ndarray  # client key R, packed (rows, W_n)
    pivots: tuple[int, ...]  # systematic pivot rows of the dual generator
    mask_seed: int

    @property
    def rows(self) -> int:
        return self.matrix.rows

    @property
    def n(self) -> int:
        return self.pair.n


def dual_systematic(pair: DualPair) -> tuple[DenseMatrixF2, list[int]]:
    """Systematic n x k generator of the dual code and its pivot rows."""
    return systematic_form(materialize(pair.dual))


def offline_encrypt(matrix: DenseMatrixF2, pair: DualPair, seed: int) -> EmvpInstance:
    """M_hat = M Gs + R with Gs the systematic dual generator, R the seeded mask."""
    ell = pair.primal.k
    if matrix.cols != ell:
        raise ValueError(f"matrix has {matrix.cols} columns, message dimension is {ell}")
    h_sys, pivots = dual_systematic(pair)
    gs = h_sys.transpose()  # k x n, rows are dual codewords
    prod = matrix.matmul(gs)
    wn = n_words(pair.n)
    mask = np.empty((matrix.rows, wn), dtype=np.uint64)
    for i in range(matrix.rows):
        mask[i] = rng.random_bits(pair.n, rng.derive_seed(seed, i))
    m_hat = DenseMatrixF2(
        rows=matrix.rows, cols=pair.n, row_words=prod.row_words ^ mask
    )
    return EmvpInstance(
        pair=pair, matrix=matrix, m_hat=m_hat, mask_rows=mask,
        pivots=tuple(pivots), mask_seed=seed,
    )


def embed_query(q: BitVector, pivots: tuple[int, ...], n: int) -> BitVector:
    """Place q on the pivot coordinates of F_2^n, zero elsewhere."""
    if q.n != len(pivots):
        raise ValueError("query length does not match pivot count")
    bits = np.zeros(n, dtype=np.uint8)
    bits[list(pivots)] = q.to_bits()
    return BitVector.from_bits(bits)


def query(
    pair: DualPair, q: BitVector, seed: int, pivots: tuple[int, ...] | None = None
) -> tuple[BitVector, BitVector]:
    """Masked query and its key: q_hat = expand(q) xor encode(primal, r).

    A length-n q is used as the expanded query directly; a length-l q is
    first embedded on the systematic pivots.  Returns (q_hat, r); r = 0
    means q_hat equals the expanded query itself.
    """
    n, k = pair.n, pair.primal.k
    if q.n == n:
        expanded = q
    elif q.n == k:
        if pivots is None:
            _, piv = dual_systematic(pair)
            pivots = tuple(piv)
        expanded = embed_query(q, pivots, n)
    else:
        raise ValueError(f"query length must be {k} or {n}")
    r = BitVector.random(k, rng.derive_seed(seed, 0x71))
    return expanded ^ encode(pair.primal, r), r


def is_primal_codeword(pair: DualPair, v: BitVector) -> bool:
    """Membership via the dual: v is in the primal code iff it is orthogonal
    to every column of the dual generator."""
    from .codes import generator_column_words

    h = generator_column_words(pair.dual)
    return not (np.bitwise_count(h & v.words[None, :]).sum(axis=1) & 1).any()


def server_answer(instance: EmvpInstance, q_hat: BitVector) -> BitVector:
    """The server's entire job: one matrix-vector product with M_hat."""
    return instance.m_hat.matvec(q_hat)


def client_decode(instance: EmvpInstance, q_hat: BitVector, answer: BitVector) -> BitVector:
    """Remove the mask contribution R q_hat; duality has already cancelled the
    codeword mask inside M Gs q_hat."""
    mask_dot = (
        np.bitwise_count(instance.mask_rows & q_hat.words[None, :]).sum(axis=1) & 1
    ).astype(np.uint8)
    from .bitvec import pack_bits

    return answer ^ BitVector(pack_bits(mask_dot), instance.rows)


def roundtrip(instance: EmvpInstance, q: BitVector, query_seed: int = 0) -> BitVector:
    """Full protocol pass; returns exactly M q in this noiseless model."""
    q_hat, _ = query(instance.pair, q, query_seed, pivots=instance.pivots)
    return client_decode(instance, q_hat, server_answer(instance, q_hat))


def run_demo(n: int, m: int, rows: int, seed: int, queries: int = 20) -> dict:
    """Sampled end-to-end transcript: PASS iff every roundtrip equals direct M q."""
    from .codes import sample_pair

    pair = sample_pair(n, m, seed)
    ell = n // 2
    bits = np.empty((rows, ell), dtype=np.uint8)
    for i in range(rows):
        bits[i] = BitVector.random(ell, rng.derive_seed(seed, 0x4D, i)).to_bits()
    matrix = DenseMatrixF2.from_bit_rows(bits)
    instance = offline_encrypt(matrix, pair, rng.derive_seed(seed, 0x52))
    failures = []
    for t in range(queries):
        q = BitVector.random(ell, rng.derive_seed(seed, 0x51, t))
        got = roundtrip(instance, q, query_seed=rng.derive_seed(seed, 0x53, t))
        want = matrix.matvec(q)
        if got != want:
            failures.append(t)
    return {
        "n": n,
        "m": m,
        "rows": rows,
        "queries": queries,
        "seed": seed,
        "failures": failures,
        "pass": not failures,
    }
