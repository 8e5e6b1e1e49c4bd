import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairlab.construction import BasePair, build_P0, p0_layout
from pairlab.linalg import (
    BlockLayout,
    DimensionError,
    Mat,
    MatrixFormatError,
    SingularMatrixError,
    assemble_blocks,
    batch_invertible,
    extract_block,
    format_matrix,
    is_nilpotent_with_index,
    kernel_basis,
    mat_add,
    mat_inverse,
    mat_mul,
    mat_scale,
    parse_matrix,
    rank,
    rref,
)
from pairlab.field import field

from conftest import jordan, rand_invertible, rand_mat


def test_mul_examples():
    J = jordan(2, 2)
    assert mat_mul(J, J).is_zero()
    A = Mat([[1, 2], [3, 4]], 5)
    assert mat_mul(Mat.identity(2, 5), A) == A
    assert mat_scale(2, Mat.identity(2, 3)) == Mat([[2, 0], [0, 2]], 3)
    assert mat_scale(field(3)(2), Mat.identity(2, 3)) == Mat([[2, 0], [0, 2]], 3)


def test_dimension_and_field_errors():
    with pytest.raises(DimensionError):
        mat_mul(Mat.identity(2, 5), Mat.identity(3, 5))
    with pytest.raises(DimensionError):
        mat_add(Mat.identity(2, 5), Mat.identity(3, 5))
    with pytest.raises(ValueError):
        mat_add(Mat.identity(2, 5), Mat.identity(2, 7))


def test_large_modulus_products_are_exact():
    p = 2147483629  # largest prime below 2**31
    A = Mat([[p - 1, p - 2], [3, p - 1]], p)
    want = [[sum(int(A[i, k]) * int(A[k, j]) for k in range(2)) % p for j in range(2)] for i in range(2)]
    assert (A @ A).tolist() == want


def test_rref_examples():
    R, r, piv = rref(Mat([[1, 2], [2, 4]], 5))
    assert R == Mat([[1, 2], [0, 0]], 5) and r == 1 and piv == [0]
    assert rref(Mat.zeros(3, 4, 7))[1] == 0
    assert rref(Mat.identity(3, 2))[1] == 3


def test_kernel_examples():
    (v,) = kernel_basis(Mat([[1, 2]], 5))
    assert v == Mat([[3], [1]], 5)
    assert kernel_basis(Mat([[1, 1], [0, 1]], 5)) == []
    assert len(kernel_basis(Mat.zeros(2, 2, 5))) == 2


def test_inverse_examples():
    assert mat_inverse(mat_scale(2, Mat.identity(2, 7))) == mat_scale(4, Mat.identity(2, 7))
    U = Mat([[1, 1], [0, 1]], 2)
    assert mat_inverse(U) == U
    with pytest.raises(SingularMatrixError):
        mat_inverse(Mat([[1, 2], [2, 4]], 5))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_inverse_random(p, rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        X = rand_invertible(rng, n, p)
        assert mat_mul(X, mat_inverse(X)) == Mat.identity(n, p)
        assert mat_mul(mat_inverse(X), X) == Mat.identity(n, p)


@given(st.sampled_from([2, 3, 5, 101]), st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))
def test_rank_nullity(p, r, c, seed):
    A = rand_mat(np.random.default_rng(seed), r, p, c)
    basis = kernel_basis(A)
    assert rank(A) + len(basis) == c
    for v in basis:
        assert (A @ v).is_zero()


@given(st.sampled_from([2, 3, 7]), st.integers(1, 5), st.integers(0, 2**32))
def test_rref_is_reduced(p, n, seed):
    A = rand_mat(np.random.default_rng(seed), n, p, n + 1)
    R, r, piv = rref(A)
    for row, c in enumerate(piv):
        assert R[row, c] == 1
        col = R.a[:, c]
        assert int(np.count_nonzero(col)) == 1
    assert R.a[r:].sum() == 0


def test_batch_invertible_matches_rank(rng):
    for p, n in [(2, 3), (5, 4), (7, 2), (101, 3)]:
        stack = rng.integers(0, p, size=(300, n, n))
        want = [rank(Mat(s, p)) == n for s in stack]
        assert batch_invertible(stack, p).tolist() == want


def test_blocks_examples():
    L = BlockLayout.square([1, 1])
    assert assemble_blocks(L, {(1, 2): Mat([[1]], 3)}, 3) == Mat([[0, 1], [0, 0]], 3)
    P0 = build_P0(BasePair(Mat([[1]], 2), Mat([[1]], 2)))
    assert extract_block(P0.A, p0_layout(1), 1, 5) == Mat.identity(2, 2)


def test_blocks_shape_mismatch():
    with pytest.raises(DimensionError):
        assemble_blocks(BlockLayout.square([1, 2]), {(1, 2): Mat([[1]], 3)}, 3)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4), st.lists(st.integers(0, 3), min_size=1, max_size=4),
       st.integers(0, 2**32))
def test_block_round_trip(rs, cs, seed):
    rng = np.random.default_rng(seed)
    L = BlockLayout(rs, cs)
    blocks = {(i + 1, j + 1): Mat(rng.integers(0, 5, size=(r, c)), 5)
              for i, r in enumerate(rs) for j, c in enumerate(cs)}
    A = assemble_blocks(L, blocks, 5)
    for (i, j), blk in blocks.items():
        assert extract_block(A, L, i, j) == blk


def test_nilpotent_index():
    J3 = jordan(3, 5)
    assert is_nilpotent_with_index(J3, 3)
    assert not is_nilpotent_with_index(J3, 2)
    assert is_nilpotent_with_index(Mat.zeros(2, 2, 5), 1)


def test_text_round_trip(rng):
    A = rand_mat(rng, 3, 7, 4)
    assert parse_matrix(format_matrix(A)) == A
    assert parse_matrix("2 2 5\n1 2\n3 4\n") == Mat([[1, 2], [3, 4]], 5)


@pytest.mark.parametrize("text", ["2 2 5\n1 2\n3 7\n", "2 2 4\n1 0\n0 1\n", "2 2\n1 2\n", "2 2 5\n1 2\n", "1 2 5\n1\n"])
def test_text_errors(text):
    with pytest.raises(MatrixFormatError):
        parse_matrix(text)
