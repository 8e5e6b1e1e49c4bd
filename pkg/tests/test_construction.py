import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairlab.construction import (
    BasePair,
    LiftError,
    build_E1_pair,
    build_P0,
    build_T,
    build_W,
    is_in_E1,
    lift_similarity,
    p0_layout,
)
from pairlab.linalg import Mat, extract_block, mat_inverse, rank
from pairlab.pairs import check_n23

from conftest import jordan, rand_invertible, rand_mat


def test_T_examples(rng):
    one = Mat([[1]], 2)
    assert build_T(BasePair(one, one)) == Mat([[0, 1], [1, 1]], 2)
    Z = Mat.zeros(2, 2, 3)
    T = build_T(BasePair(Z, Z))
    assert T.tolist() == [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]]
    T = build_T(BasePair(rand_mat(rng, 2, 5), rand_mat(rng, 2, 5)))
    assert Mat(T.a[2:, :2], 5) == Mat.identity(2, 5)


def test_W_examples():
    assert build_W(1, 2) == Mat([[0, 1]], 2)
    assert build_W(2, 5).tolist() == [[0, 0, 1, 0], [0, 0, 0, 1]]
    for n in (1, 2, 3, 4):
        assert rank(build_W(n, 7)) == n
    with pytest.raises(ValueError):
        build_W(0, 2)


def test_P0_nonzero_counts():
    one = Mat([[1]], 2)
    P0 = build_P0(BasePair(one, one))
    # oracle: A0 has three 2x2 identities; B0 three 2x2 identities, T = [[0,1],[1,1]], W = [0,1]
    assert int(np.count_nonzero(P0.A.a)) == 3 * 2 == 6
    assert int(np.count_nonzero(P0.B.a)) == 3 * 2 + 3 + 1 == 10


def test_P0_block_pattern(rng):
    n, p = 2, 5
    base = BasePair(rand_mat(rng, n, p), rand_mat(rng, n, p))
    P0 = build_P0(base)
    L = p0_layout(n)
    assert L.row_stripes == (4, 4, 4, 2, 4, 4, 4)
    I2 = Mat.identity(2 * n, p)
    want_A = {(1, 5): I2, (2, 6): I2, (3, 7): I2}
    want_B = {(1, 3): I2, (2, 5): I2, (5, 7): I2, (3, 6): build_T(base), (4, 6): build_W(n, p)}
    for i in range(1, 8):
        for j in range(1, 8):
            a, b = extract_block(P0.A, L, i, j), extract_block(P0.B, L, i, j)
            assert a == want_A[(i, j)] if (i, j) in want_A else a.is_zero()
            assert b == want_B[(i, j)] if (i, j) in want_B else b.is_zero()


@given(st.sampled_from([2, 3, 5, 7, 101]), st.integers(1, 4), st.integers(0, 2**32))
def test_P0_in_n23(p, n, seed):
    rng = np.random.default_rng(seed)
    P0 = build_P0(BasePair(rand_mat(rng, n, p), rand_mat(rng, n, p)))
    assert P0.A.rows == 13 * n
    assert check_n23(P0.pair)


def test_E1_pair_examples():
    p = 5
    base = BasePair(Mat([[2]], p), Mat([[3]], p))
    P, Q = build_E1_pair(base)
    assert Q == Mat([[1, 2, 0], [0, 1, 3], [0, 0, 1]], p)
    assert P == Mat([[1, 1, 0], [0, 1, 1], [0, 0, 1]], p)
    I3 = Mat.identity(3, p)
    assert ((P - I3) ** 3).is_zero() and ((Q - I3) ** 3).is_zero()


def test_is_in_E1():
    p = 5
    I = Mat.identity(2, p)
    assert is_in_E1(BasePair(I, I))
    assert is_in_E1(BasePair(jordan(2, p, eig=1), I))
    assert not is_in_E1(BasePair(Mat([[1, 0], [0, 2]], p), I))


def test_lift_examples(rng):
    p = 5
    base = BasePair(rand_mat(rng, 2, p), rand_mat(rng, 2, p))
    assert lift_similarity(Mat.identity(2, p), base, base) == Mat.identity(26, p)
    for _ in range(20):
        X = rand_invertible(rng, 2, p)
        other = base.conjugate(X)
        S = lift_similarity(X, base, other)
        Si = mat_inverse(S)
        assert Si @ build_P0(base).A @ S == build_P0(other).A
        assert Si @ build_P0(base).B @ S == build_P0(other).B
    with pytest.raises(LiftError):
        lift_similarity(Mat([[1, 0], [1, 1]], p), BasePair(jordan(2, p), jordan(2, p)),
                        BasePair(jordan(2, p), jordan(2, p)))
