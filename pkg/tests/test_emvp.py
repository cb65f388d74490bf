import numpy as np
import pytest

from fastdual import rng
from fastdual.bitvec import BitVector
from fastdual.codes import DenseMatrixF2, encode, sample_pair
from fastdual.emvp import (
    client_decode,
    dual_systematic,
    embed_query,
    is_primal_codeword,
    offline_encrypt,
    query,
    roundtrip,
    run_demo,
    server_answer,
)


def random_matrix(rows: int, cols: int, seed: int) -> DenseMatrixF2:
    bits = np.empty((rows, cols), dtype=np.uint8)
    for i in range(rows):
        bits[i] = BitVector.random(cols, rng.derive_seed(seed, i)).to_bits()
    return DenseMatrixF2.from_bit_rows(bits)


def test_unmasked_rows_are_dual_codewords():
    pair = sample_pair(32, 2, seed=4)
    inst = offline_encrypt(DenseMatrixF2.identity(16), pair, seed=1)
    unmasked = inst.m_hat.row_words ^ inst.mask_rows
    gs = dual_systematic(pair)[0].transpose()
    assert (unmasked == gs.row_words).all()
    # every unmasked row orthogonal to sampled primal codewords
    for i in range(16):
        row = BitVector(unmasked[i], 32)
        for t in range(25):
            c = encode(pair.primal, BitVector.random(16, rng.derive_seed(9, i, t)))
            assert row.inner(c) == 0


def test_offline_mask_involution():
    pair = sample_pair(24, 2, seed=6)
    mat = random_matrix(10, 12, seed=3)
    inst = offline_encrypt(mat, pair, seed=8)
    gs = dual_systematic(pair)[0].transpose()
    assert ((inst.m_hat.row_words ^ inst.mask_rows) == mat.matmul(gs).row_words).all()


def test_offline_dimension_check():
    pair = sample_pair(16, 1, seed=0)
    with pytest.raises(ValueError):
        offline_encrypt(random_matrix(4, 5, seed=0), pair, seed=0)


def test_query_masking():
    pair = sample_pair(40, 3, seed=10)
    _, piv = dual_systematic(pair)
    for t in range(10):
        q = BitVector.random(20, rng.derive_seed(2, t))
        q_hat, r = query(pair, q, seed=t)
        expanded = embed_query(q, tuple(piv), 40)
        assert q_hat ^ expanded == encode(pair.primal, r)
        assert is_primal_codeword(pair, q_hat ^ expanded)
    # length-n query used directly; distinct seeds give distinct masks
    qn = BitVector.random(40, 123)
    h1, _ = query(pair, qn, seed=1)
    h2, _ = query(pair, qn, seed=2)
    assert h1 != h2
    with pytest.raises(ValueError):
        query(pair, BitVector.random(13, 0), seed=0)


def test_roundtrip_unit_and_zero_queries():
    pair = sample_pair(64, 3, seed=4)
    mat = random_matrix(20, 32, seed=0)
    inst = offline_encrypt(mat, pair, seed=2)
    bits = mat.to_bit_rows()
    for j in (0, 7, 31):
        got = roundtrip(inst, BitVector.unit(32, j), query_seed=j)
        assert (got.to_bits() == bits[:, j]).all()  # column j of M
    assert roundtrip(inst, BitVector.zeros(32), query_seed=5).weight() == 0


def test_roundtrip_random_queries_exact():
    pair = sample_pair(48, 2, seed=14)
    mat = random_matrix(16, 24, seed=5)
    inst = offline_encrypt(mat, pair, seed=6)
    for t in range(50):
        q = BitVector.random(24, rng.derive_seed(3, t))
        assert roundtrip(inst, q, query_seed=t) == mat.matvec(q)


def test_decode_requires_the_mask():
    # dropping the client key leaves the answer wrong for a query with content
    pair = sample_pair(32, 2, seed=3)
    mat = random_matrix(12, 16, seed=9)
    inst = offline_encrypt(mat, pair, seed=4)
    q = BitVector.random(16, 77)
    q_hat, _ = query(pair, q, seed=5, pivots=inst.pivots)
    raw = server_answer(inst, q_hat)
    assert client_decode(inst, q_hat, raw) == mat.matvec(q)
    assert raw != mat.matvec(q)  # overwhelmingly likely with a random mask


def test_run_demo_transcript():
    res = run_demo(n=64, m=2, rows=16, seed=5, queries=10)
    assert res["pass"] is True and res["failures"] == []
    assert res["n"] == 64 and res["queries"] == 10
