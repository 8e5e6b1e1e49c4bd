import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairlab.construction import BasePair, build_P0
from pairlab.linalg import Mat
from pairlab.pairs import (
    BivarPoly,
    MatPair,
    NotCommutingError,
    NotInN23Error,
    QuadCoeffs,
    apply_equivalence,
    check_admissible,
    check_commuting,
    check_n23,
    enumerate_quad_coeffs,
    eval_poly_pair,
    is_in_N,
    quad_count,
    quad_to_polys,
)

from conftest import jordan, rand_mat


def naive_eval(f: BivarPoly, A: Mat, B: Mat) -> list[list[int]]:
    """Expand every monomial by repeated multiplication on plain lists."""
    n, p = A.rows, A.p
    a, b = A.tolist(), B.tolist()

    def mul(x, y):
        return [[sum(x[i][k] * y[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]

    total = [[0] * n for _ in range(n)]
    for (i, j), c in f.coeffs.items():
        term = [[int(r == s) for s in range(n)] for r in range(n)]
        for _ in range(i):
            term = mul(term, a)
        for _ in range(j):
            term = mul(term, b)
        total = [[(total[r][s] + c * term[r][s]) % p for s in range(n)] for r in range(n)]
    return total


def random_commuting_pair(rng, n, p):
    C = rand_mat(rng, n, p)
    pa = BivarPoly({(k, 0): int(rng.integers(p)) for k in range(3)}, p)
    pb = BivarPoly({(k, 0): int(rng.integers(p)) for k in range(3)}, p)
    one = MatPair(C, C)
    return MatPair(eval_poly_pair(pa, one), eval_poly_pair(pb, one))


def random_poly(rng, p, degree=4):
    coeffs = {}
    for _ in range(int(rng.integers(0, 8))):
        i = int(rng.integers(0, degree + 1))
        j = int(rng.integers(0, degree + 1 - i))
        coeffs[(i, j)] = int(rng.integers(p))
    return BivarPoly(coeffs, p)


def test_commuting_examples():
    J = jordan(2, 5)
    assert check_commuting(MatPair(J, J))
    assert not check_commuting(MatPair(J, Mat([[1, 0], [0, 2]], 5)))
    assert check_commuting(MatPair(J, Mat.identity(2, 5)))


def test_n23_examples(rng):
    assert check_n23(MatPair(jordan(2, 3), Mat.zeros(2, 2, 3)))
    assert not check_n23(MatPair(jordan(3, 3), Mat.zeros(3, 3, 3)))
    for p in (2, 5):
        base = BasePair(rand_mat(rng, 2, p), rand_mat(rng, 2, p))
        assert check_n23(build_P0(base).pair)


def test_eval_examples():
    p = 5
    J2, J3 = jordan(2, p), jordan(3, p)
    P = MatPair(J2, J2)
    assert eval_poly_pair(BivarPoly.x(p), P) == J2
    assert eval_poly_pair(BivarPoly({(1, 1): 1}, p), P).is_zero()
    assert eval_poly_pair(BivarPoly({(0, 2): 1}, p), MatPair(Mat.zeros(3, 3, p), J3)) == J3 @ J3


def test_eval_rejects_noncommuting():
    with pytest.raises(NotCommutingError):
        eval_poly_pair(BivarPoly.x(5), MatPair(jordan(2, 5), jordan(2, 5).T))


def test_eval_matches_naive_oracle(rng):
    for _ in range(60):
        p = int(rng.choice([2, 3, 5, 7]))
        n = int(rng.integers(1, 5))
        P = random_commuting_pair(rng, n, p)
        f = random_poly(rng, p)
        assert eval_poly_pair(f, P).tolist() == naive_eval(f, P.A, P.B)


def test_admissible_examples():
    p = 5
    x, y = BivarPoly.x(p), BivarPoly.y(p)
    assert check_admissible(x, y)
    assert check_admissible(BivarPoly({(1, 0): 2, (1, 1): 1}, p), BivarPoly({(1, 0): 1, (0, 1): 3}, p))
    assert not check_admissible(BivarPoly({(1, 0): 1, (0, 0): 1}, p), y)
    assert not check_admissible(x, x)


def test_quad_to_polys_examples():
    f, g = quad_to_polys(QuadCoeffs.identity(5))
    assert (f, g) == (BivarPoly.x(5), BivarPoly.y(5))
    f, g = quad_to_polys(QuadCoeffs.make(5, alpha=2, gamma=1, beta=3))
    assert f == BivarPoly({(1, 0): 2}, 5)
    assert g == BivarPoly({(1, 0): 1, (0, 1): 3}, 5)
    with pytest.raises(ValueError):
        QuadCoeffs.make(5, alpha=0)
    with pytest.raises(ValueError):
        QuadCoeffs.make(5, beta=0)


@given(st.sampled_from([2, 3, 5, 7]), st.lists(st.integers(0, 100), min_size=7, max_size=7))
def test_quad_polys_always_admissible(p, raw):
    a, b = raw[0] % (p - 1) + 1, raw[1] % (p - 1) + 1
    q = QuadCoeffs.make(p, a, b, *raw[2:])
    assert check_admissible(*quad_to_polys(q))


def test_apply_equivalence_examples(rng):
    P = MatPair(jordan(2, 3), Mat.zeros(2, 2, 3))
    assert apply_equivalence(P, QuadCoeffs.identity(3)) == P
    out = apply_equivalence(P, QuadCoeffs.make(3, alpha=2, gamma=1, beta=1))
    assert out == MatPair(2 * jordan(2, 3), jordan(2, 3))
    with pytest.raises(NotInN23Error):
        apply_equivalence(MatPair(jordan(3, 3), Mat.zeros(3, 3, 3)), QuadCoeffs.identity(3))


def test_apply_equivalence_stays_in_n23(rng):
    for _ in range(50):
        p = int(rng.choice([2, 3, 5, 7]))
        n = int(rng.integers(1, 3))
        P = build_P0(BasePair(rand_mat(rng, n, p), rand_mat(rng, n, p))).pair
        vals = rng.integers(0, p, size=7)
        q = QuadCoeffs.make(p, int(rng.integers(1, p)), int(rng.integers(1, p)), *vals[2:])
        assert check_n23(apply_equivalence(P, q))


def test_admissible_images_commute_and_are_nilpotent(rng):
    for _ in range(30):
        p = int(rng.choice([3, 5]))
        P = build_P0(BasePair(rand_mat(rng, 1, p), rand_mat(rng, 1, p))).pair
        assert is_in_N(P)
        while True:
            f, g = random_poly(rng, p, 3), random_poly(rng, p, 3)
            f = BivarPoly({k: v for k, v in f.coeffs.items() if k != (0, 0)}, p)
            g = BivarPoly({k: v for k, v in g.coeffs.items() if k != (0, 0)}, p)
            if check_admissible(f, g):
                break
        assert is_in_N(MatPair(eval_poly_pair(f, P), eval_poly_pair(g, P)))


def test_enumeration_counts_and_order():
    # oracle: product count (p-1)^2 p^5
    assert sum(1 for _ in enumerate_quad_coeffs(2)) == 1 * 1 * 2**5 == 32
    assert sum(1 for _ in enumerate_quad_coeffs(3)) == 2 * 2 * 3**5 == 972
    assert quad_count(3) == 972
    first = next(enumerate_quad_coeffs(2))
    assert first.is_identity()
    keys = [q.key() for q in enumerate_quad_coeffs(3)]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_poly_text_round_trip():
    f = BivarPoly({(1, 0): 2, (1, 1): 4, (0, 3): 1}, 5)
    assert BivarPoly.from_text(f.to_text(), 5) == f
    assert BivarPoly({(0, 0): 5}, 5).coeffs == {}
