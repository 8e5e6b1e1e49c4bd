"""Arithmetic in the prime field GF(p)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class FieldMismatchError(ValueError):
    """Raised when elements of different prime fields are combined."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldCtx:
    """The field GF(p); calling the context coerces an integer into it."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"modulus must be prime, got {self.p!r}")

    def __call__(self, value: int) -> FieldElem:
        return FieldElem(int(value) % self.p, self.p)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(0, self.p)

    @property
    def one(self) -> FieldElem:
        return FieldElem(1, self.p)

    def elements(self):
        return [FieldElem(v, self.p) for v in range(self.p)]


@lru_cache(maxsize=None)
def field(p: int) -> FieldCtx:
    return FieldCtx(p)


@dataclass(frozen=True)
class FieldElem:
    value: int
    p: int

    def __post_init__(self):
        if not 0 <= self.value < self.p:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.p}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise FieldMismatchError(f"GF({self.p}) vs GF({other.p})")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElem((self.value + v) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElem((self.value - v) % self.p, self.p)

    def __rsub__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElem((v - self.value) % self.p, self.p)

    def __mul__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return FieldElem(self.value * v % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value % self.p, self.p)

    def __truediv__(self, other):
        v = self._other(other)
        if v is NotImplemented:
            return v
        return self * ff_inv(FieldElem(v, self.p))

    def __pow__(self, k: int):
        if k < 0:
            return ff_inv(self) ** (-k)
        return FieldElem(pow(self.value, k, self.p), self.p)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def _check(a: FieldElem, b: FieldElem) -> None:
    if a.p != b.p:
        raise FieldMismatchError(f"GF({a.p}) vs GF({b.p})")


def ff_add(a: FieldElem, b: FieldElem) -> FieldElem:
    _check(a, b)
    return FieldElem((a.value + b.value) % a.p, a.p)


def ff_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    _check(a, b)
    return FieldElem(a.value * b.value % a.p, a.p)


def ff_neg(a: FieldElem) -> FieldElem:
    return FieldElem(-a.value % a.p, a.p)


def inv_mod(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p`` by the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    r0, r1, s0, s1 = p, a, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


def ff_inv(a: FieldElem) -> FieldElem:
    return FieldElem(inv_mod(a.value, a.p), a.p)
