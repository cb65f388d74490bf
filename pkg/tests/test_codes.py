import numpy as np
import pytest

from conftest import naive_accumulate, naive_derivative, naive_permute, naive_repeat
from fastdual import rng
from fastdual.bitvec import BitVector, Permutation
from fastdual.codes import (
    CodeSpec,
    DenseMatrixF2,
    DualPair,
    build_chain,
    dual_product_check,
    encode,
    materialize,
    pair_from_perms,
    rank,
    sample_pair,
    systematic_form,
)
from fastdual.kernels import Accumulate, AccumulateT, Derivative, DerivativeT, Permute, Repeat


def naive_encode(spec: CodeSpec, bits: list[int]) -> list[int]:
    """Independent oracle: list-based composition in application order."""
    perms = spec.resolve_perms()
    x = naive_repeat(bits, spec.r)
    acc = naive_accumulate_t if spec.transposed else naive_accumulate
    der = naive_derivative_t if spec.transposed else naive_derivative
    if spec.family == "RA":
        for p in perms:
            x = naive_accumulate(naive_permute(x, p.map)) if not spec.transposed else \
                naive_accumulate_t(naive_permute(x, p.map))
    elif spec.family == "RDA":
        for i in range(0, len(perms), 2):
            x = der(naive_permute(x, perms[i].map))
            x = acc(naive_permute(x, perms[i + 1].map))
    else:
        for i in range(0, len(perms), 2):
            x = acc(naive_permute(x, perms[i].map))
            x = der(naive_permute(x, perms[i + 1].map))
    return x


from conftest import naive_accumulate_t, naive_derivative_t  # noqa: E402


def test_sampled_pair_op_pattern():
    pair = sample_pair(8, 1, seed=5)
    prim, dual = pair.primal.ops, pair.dual.ops
    assert [type(o) for o in prim] == [Accumulate, Permute, Derivative, Permute, Repeat]
    assert [type(o) for o in dual] == [DerivativeT, Permute, AccumulateT, Permute, Repeat]
    # shared permutations in matching slots, pi_2 left of pi_1 in matrix order
    assert prim[1].perm == dual[1].perm == pair.perms[1]
    assert prim[3].perm == dual[3].perm == pair.perms[0]
    assert prim[-1].r == 2 and dual[-1].r == 2


def test_sample_pair_deterministic():
    a = sample_pair(32, 2, seed=99)
    b = sample_pair(32, 2, seed=99)
    assert all(pa == pb for pa, pb in zip(a.perms, b.perms))
    c = sample_pair(32, 2, seed=100)
    assert any(pa != pc for pa, pc in zip(a.perms, c.perms))


def test_identity_perm_pair_n4():
    perms = (Permutation.identity(4), Permutation.identity(4))
    pair = pair_from_perms(4, 1, perms)
    prod = materialize(pair.dual).transpose().matmul(materialize(pair.primal))
    assert prod.rows == prod.cols == 2 and prod.is_zero()
    assert dual_product_check(pair) == (True, None)


def test_sample_pair_argument_validation():
    with pytest.raises(ValueError):
        sample_pair(7, 1, 0)
    with pytest.raises(ValueError):
        sample_pair(2, 1, 0)


def test_rad_identity_encode_example():
    perms = (Permutation.identity(4), Permutation.identity(4))
    chain = build_chain(CodeSpec(family="RAD", n=4, m=1, perms=perms))
    assert encode(chain, BitVector.from_string("10")).to_string() == "1100"


def test_encode_linearity_and_zero():
    pair = sample_pair(40, 2, seed=8)
    z = BitVector.zeros(20)
    assert encode(pair.primal, z).weight() == 0
    for t in range(20):
        a = BitVector.random(20, rng.derive_seed(1, t))
        b = BitVector.random(20, rng.derive_seed(2, t))
        assert encode(pair.primal, a ^ b) == encode(pair.primal, a) ^ encode(pair.primal, b)


def test_encode_matches_naive_oracle():
    for family in ("RA", "RAD", "RDA"):
        for transposed in (False, True):
            spec = CodeSpec(family=family, n=20, m=2, r=2, seed=77, transposed=transposed)
            chain = build_chain(spec)
            for t in range(10):
                msg = BitVector.random(10, rng.derive_seed(3, t))
                want = naive_encode(spec, [int(b) for b in msg.to_bits()])
                assert list(encode(chain, msg).to_bits()) == want, (family, transposed)


def test_materialize_bare_repetition():
    # [F_2] alone: 4x2 matrix with a 1 at (i, j) iff row i repeats message bit j
    from fastdual.codes import EncoderChain

    mat = materialize(EncoderChain(ops=(Repeat(2),), k=2, n=4))
    assert mat.to_bit_rows().tolist() == [[1, 0], [1, 0], [0, 1], [0, 1]]


def test_materialize_repeat_structure():
    chain = build_chain(CodeSpec(family="RA", n=4, m=1,
                                 perms=(Permutation.identity(4),)))
    mat = materialize(chain)
    # F_2 block structure before accumulation: column j = A F_2 e_j
    # A F_2 e_0 = prefix-xor(1,1,0,0) = (1,0,0,0); A F_2 e_1 = prefix-xor(0,0,1,1) = (0,0,1,0)
    assert [mat.get(i, 0) for i in range(4)] == [1, 0, 0, 0]
    assert [mat.get(i, 1) for i in range(4)] == [0, 0, 1, 0]


def test_materialize_encode_consistency():
    pair = sample_pair(48, 3, seed=21)
    mat = materialize(pair.primal)
    for t in range(100):
        msg = BitVector.random(24, rng.derive_seed(4, t))
        assert mat.matvec(msg) == encode(pair.primal, msg)


def test_materialize_exhaustive_small_k():
    pair = sample_pair(16, 2, seed=5)
    mat = materialize(pair.primal)
    for i in range(1 << 8):
        msg = BitVector.from_bits([(i >> j) & 1 for j in range(8)])
        assert mat.matvec(msg) == encode(pair.primal, msg)


def test_materialize_cap():
    pair = sample_pair(64, 1, seed=0)
    with pytest.raises(ValueError):
        materialize(pair.primal, max_n=32)


def test_duality_and_rank_sweep():
    sizes = [4, 6, 16, 50, 128]
    for i, n in enumerate(sizes):
        m = 1 + (i % 4)
        pair = sample_pair(n, m, seed=rng.derive_seed(1000, i))
        assert dual_product_check(pair) == (True, None)
        rg, rh = rank(materialize(pair.primal)), rank(materialize(pair.dual))
        assert rg == n // 2 and rh == n // 2  # dim C + dim C-perp = n


def test_random_codeword_orthogonality():
    pair = sample_pair(60, 2, seed=31)
    for t in range(50):
        c = encode(pair.primal, BitVector.random(30, rng.derive_seed(5, t)))
        d = encode(pair.dual, BitVector.random(30, rng.derive_seed(6, t)))
        assert c.inner(d) == 0


def test_corrupted_permutation_breaks_duality():
    pair = sample_pair(16, 2, seed=11)
    perms = list(pair.perms)
    bad = np.array(perms[0].map)
    bad[[0, 1]] = bad[[1, 0]]
    primal_bad = build_chain(
        CodeSpec(family="RDA", n=16, m=2, perms=tuple([Permutation(bad)] + perms[1:]))
    )
    broken = DualPair(primal=primal_bad, dual=pair.dual, perms=pair.perms, n=16, m=2)
    ok, violation = dual_product_check(broken)
    assert not ok and violation is not None


def test_systematic_form_examples():
    ident = DenseMatrixF2.identity(5)
    s, piv = systematic_form(ident)
    assert piv == list(range(5)) and (s.to_bit_rows() == np.eye(5, dtype=np.uint8)).all()

    mat = DenseMatrixF2.from_bit_rows(np.array([[1, 1], [1, 0], [0, 0], [0, 1]], np.uint8))
    s, piv = systematic_form(mat)
    assert piv == [0, 1]
    assert (s.to_bit_rows()[piv, :] == np.eye(2, dtype=np.uint8)).all()


def test_systematic_form_of_generator():
    pair = sample_pair(32, 2, seed=13)
    mat = materialize(pair.dual)
    s, piv = systematic_form(mat)
    assert len(piv) == 16 and len(set(piv)) == 16
    assert (s.to_bit_rows()[piv, :] == np.eye(16, dtype=np.uint8)).all()
    # same column space: stacking does not raise the rank
    stacked = DenseMatrixF2.from_bit_rows(
        np.concatenate([mat.to_bit_rows(), s.to_bit_rows()], axis=1)
    )
    assert rank(stacked) == rank(mat) == 16


def test_systematic_form_rank_deficient_raises():
    mat = DenseMatrixF2.from_bit_rows(np.array([[1, 1], [0, 0], [1, 1]], np.uint8))
    with pytest.raises(RuntimeError):
        systematic_form(mat)


def test_code_spec_json_roundtrip():
    spec = CodeSpec(family="RDA", n=16, m=2, seed=7)
    assert CodeSpec.from_json(spec.to_json()) == spec
    explicit = CodeSpec(family="RA", n=8, m=1, perms=(Permutation.random(8, 3),))
    back = CodeSpec.from_json(explicit.to_json())
    assert back.perms == explicit.perms


def test_code_spec_validation():
    with pytest.raises(ValueError):
        CodeSpec(family="RDA", n=16, m=2, r=4, seed=0)
    with pytest.raises(ValueError):
        CodeSpec(family="RA", n=9, m=1, r=2, seed=0)
    with pytest.raises(ValueError):
        CodeSpec(family="RDA", n=8, m=2, perms=(Permutation.identity(8),))
    with pytest.raises(ValueError):
        CodeSpec(family="XX", n=8, m=1, seed=0)


def test_matrix_serialization_roundtrips():
    pair = sample_pair(24, 2, seed=100)
    mat = materialize(pair.primal)
    assert (DenseMatrixF2.from_bytes(mat.to_bytes()).to_bit_rows() == mat.to_bit_rows()).all()
    assert (DenseMatrixF2.from_text(mat.to_text()).to_bit_rows() == mat.to_bit_rows()).all()
    with pytest.raises(ValueError):
        DenseMatrixF2.from_bytes(b"not-a-matrix-blob")
