import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairlab.field import FieldCtx, FieldElem, FieldMismatchError, ff_add, ff_inv, ff_mul, ff_neg, field

PRIMES = [2, 3, 5, 7, 101]


@pytest.mark.parametrize("p, a, b, want", [(5, 3, 4, 2), (2, 1, 1, 0), (7, 0, 6, 6)])
def test_add(p, a, b, want):
    K = field(p)
    assert ff_add(K(a), K(b)) == K(want)


@pytest.mark.parametrize("p, a, b, want", [(5, 2, 3, 1), (101, 100, 100, 1)])
def test_mul(p, a, b, want):
    K = field(p)
    assert ff_mul(K(a), K(b)) == K(want)


def test_neg():
    assert ff_neg(field(3)(1)) == field(3)(2)


@pytest.mark.parametrize("p, a, want", [(5, 2, 3), (7, 3, 5), (2, 1, 1)])
def test_inv(p, a, want):
    assert ff_inv(field(p)(a)).value == want


def test_inv_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ff_inv(field(7)(0))


def test_modulus_mismatch():
    with pytest.raises(FieldMismatchError):
        ff_add(field(5)(1), field(7)(1))
    with pytest.raises(FieldMismatchError):
        field(5)(1) * field(3)(1)


@pytest.mark.parametrize("p", [1, 4, 9, 91])
def test_non_prime_rejected(p):
    with pytest.raises(ValueError):
        FieldCtx(p)


def test_noncanonical_elem_rejected():
    with pytest.raises(ValueError):
        FieldElem(5, 5)


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_field_axioms(p, x, y, z):
    K = field(p)
    a, b, c = K(x), K(y), K(z)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a + (-a) == K.zero
    if a:
        assert a * ff_inv(a) == K.one
        assert a / a == K.one
