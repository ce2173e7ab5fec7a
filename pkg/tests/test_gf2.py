import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import rank_naive
from sblp import gf2
from sblp.gf2 import BinaryMatrix

matrices = st.tuples(st.integers(1, 8), st.integers(1, 10)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))
)


def test_syndrome_small_example():
    H = BinaryMatrix([[1, 1, 0], [0, 1, 1]])
    assert gf2.syndrome([1, 0, 0], H).tolist() == [1, 0]
    assert gf2.syndrome([0, 1, 0], H).tolist() == [1, 1]


def test_syndrome_batch_matches_rows():
    H = BinaryMatrix(np.random.default_rng(0).integers(0, 2, (5, 9)))
    E = np.random.default_rng(1).integers(0, 2, (4, 9)).astype(np.uint8)
    batch = gf2.syndrome(E, H)
    assert batch.shape == (4, 5)
    for e, s in zip(E, batch):
        assert np.array_equal(gf2.syndrome(e, H), s)


def test_syndrome_length_mismatch():
    with pytest.raises(ValueError):
        gf2.syndrome([1, 0], BinaryMatrix.identity(3))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_rank_matches_naive_elimination(M):
    assert gf2.rank(BinaryMatrix(M)) == rank_naive(M)


@settings(max_examples=100, deadline=None)
@given(matrices, st.data())
def test_row_space_contains_row_combinations(M, data):
    H = BinaryMatrix(M)
    coeffs = data.draw(arrays(np.uint8, M.shape[0], elements=st.integers(0, 1)))
    v = (coeffs.astype(int) @ M.astype(int)) % 2
    assert gf2.in_row_space(v, H)
    assert v in gf2.RowSpace(H)


def test_row_space_rejects_outside_vector():
    H = BinaryMatrix([[1, 1, 0, 0], [0, 0, 1, 1]])
    assert not gf2.in_row_space([1, 0, 0, 0], H)
    assert gf2.in_row_space([1, 1, 1, 1], H)
    assert gf2.in_row_space([0, 0, 0, 0], H)


def test_rank_identity_and_zero():
    assert gf2.rank(BinaryMatrix.identity(5)) == 5
    assert gf2.rank(BinaryMatrix.zeros(3, 4)) == 0


def test_rank_does_not_mutate():
    H = BinaryMatrix([[1, 1], [1, 1]])
    before = H.dense.copy()
    gf2.rank(H)
    assert np.array_equal(before, H.dense)
    assert not H.dense.flags.writeable


def test_hamming_distance():
    assert gf2.hamming_distance([1, 0, 1], [1, 1, 0]) == 2
    with pytest.raises(ValueError):
        gf2.hamming_distance([1, 0], [1, 0, 0])


def test_kron_and_hstack_shapes():
    A = BinaryMatrix([[1, 1]])
    K = gf2.kron(A, BinaryMatrix.identity(2))
    assert K.dense.tolist() == [[1, 0, 1, 0], [0, 1, 0, 1]]
    assert gf2.hstack(A, A).shape == (1, 4)


def test_matmul_transpose_and_equality():
    A = BinaryMatrix([[1, 1, 0], [0, 1, 1]])
    assert (A @ A.T).dense.tolist() == [[0, 1], [1, 0]]
    assert A == BinaryMatrix.from_rows([[0, 1], [1, 2]], 3)
    assert hash(A) == hash(BinaryMatrix(A.dense))


def test_rejects_non_binary_entries():
    with pytest.raises(ValueError):
        BinaryMatrix([[0, 2]])
    with pytest.raises(ValueError):
        gf2.as_bits([0, 3])
