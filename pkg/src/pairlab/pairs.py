"""Matrix pairs, bivariate polynomial evaluation and the quadratic substitutions.

Polynomial substitutions ``(A, B) -> (f(A, B), g(A, B))`` are admissible when
``f`` and ``g`` have no constant term and their linear parts form a
nonsingular 2x2 matrix.  On pairs with ``A^2 = 0, B^3 = 0, AB^2 = 0`` every
admissible substitution acts like one of the form

    f = alpha*x + alpha1*y^2 + alpha2*x*y
    g = gamma*x + beta*y + beta1*y^2 + beta2*x*y,     alpha, beta != 0,

which is what :class:`QuadCoeffs` records.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Iterator, Mapping

from .field import FieldCtx, FieldElem, field
from .linalg import DimensionError, Mat, mat_pow


class NotCommutingError(ValueError):
    pass


class NotInN23Error(ValueError):
    pass


@dataclass(frozen=True)
class MatPair:
    A: Mat
    B: Mat

    def __post_init__(self):
        if not (self.A.is_square and self.B.is_square and self.A.shape == self.B.shape):
            raise DimensionError(f"pair members must be square of equal size, got {self.A.shape}, {self.B.shape}")
        if self.A.p != self.B.p:
            raise ValueError(f"pair mixes GF({self.A.p}) and GF({self.B.p})")

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def p(self) -> int:
        return self.A.p

    def is_zero(self) -> bool:
        return self.A.is_zero() and self.B.is_zero()

    def __iter__(self):
        return iter((self.A, self.B))


def check_commuting(P: MatPair) -> bool:
    return P.A @ P.B == P.B @ P.A


def check_n23(P: MatPair) -> bool:
    """Membership in N23: commuting, ``A^2 = 0``, ``B^3 = 0`` and ``A B^2 = 0``."""
    A, B = P
    B2 = B @ B
    return check_commuting(P) and (A @ A).is_zero() and (B2 @ B).is_zero() and (A @ B2).is_zero()


@dataclass(frozen=True)
class BivarPoly:
    """Polynomial in commuting ``x, y`` over GF(p); ``coeffs[(i, j)]`` multiplies ``x^i y^j``."""

    coeffs: Mapping[tuple[int, int], int]
    p: int

    def __post_init__(self):
        clean = {}
        for (i, j), c in dict(self.coeffs).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial x^{i} y^{j}")
            c = (c.value if isinstance(c, FieldElem) else int(c)) % self.p
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __getitem__(self, monomial: tuple[int, int]) -> int:
        return self.coeffs.get(monomial, 0)

    def __eq__(self, other):
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, tuple(self.coeffs.items())))

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=-1)

    @classmethod
    def x(cls, p: int) -> BivarPoly:
        return cls({(1, 0): 1}, p)

    @classmethod
    def y(cls, p: int) -> BivarPoly:
        return cls({(0, 1): 1}, p)

    def to_text(self) -> str:
        return "".join(f"{c} {i} {j}\n" for (i, j), c in self.coeffs.items())

    @classmethod
    def from_text(cls, text: str, p: int) -> BivarPoly:
        coeffs: dict[tuple[int, int], int] = {}
        for k, line in enumerate(text.splitlines(), start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 3:
                raise ValueError(f"line {k}: expected 'coeff i j', got {line!r}")
            c, i, j = (int(t) for t in parts)
            coeffs[(i, j)] = (coeffs.get((i, j), 0) + c) % p
        return cls(coeffs, p)


def _powers(M: Mat, k: int) -> list[Mat]:
    out = [Mat.identity(M.rows, M.p)]
    for _ in range(k):
        out.append(out[-1] @ M)
    return out


def eval_poly_pair(f: BivarPoly, P: MatPair) -> Mat:
    """``sum c_ij A^i B^j``; only defined for commuting pairs."""
    if f.p != P.p:
        raise ValueError(f"polynomial over GF({f.p}) evaluated on a GF({P.p}) pair")
    if not check_commuting(P):
        raise NotCommutingError("polynomial evaluation needs a commuting pair")
    da = max((i for i, _ in f.coeffs), default=0)
    db = max((j for _, j in f.coeffs), default=0)
    pa, pb = _powers(P.A, da), _powers(P.B, db)
    acc = Mat.zeros(P.n, P.n, P.p)
    for (i, j), c in f.coeffs.items():
        acc = acc + c * (pa[i] @ pb[j])
    return acc


def check_admissible(f: BivarPoly, g: BivarPoly) -> bool:
    if f.p != g.p:
        raise ValueError("polynomials over different fields")
    if f[(0, 0)] or g[(0, 0)]:
        return False
    det = f[(1, 0)] * g[(0, 1)] - f[(0, 1)] * g[(1, 0)]
    return det % f.p != 0


_QUAD_ORDER = ("alpha", "beta", "gamma", "alpha1", "alpha2", "beta1", "beta2")


@dataclass(frozen=True)
class QuadCoeffs:
    """Coefficients of a normalised quadratic substitution; ``alpha`` and ``beta`` are nonzero."""

    alpha: FieldElem
    alpha1: FieldElem
    alpha2: FieldElem
    gamma: FieldElem
    beta: FieldElem
    beta1: FieldElem
    beta2: FieldElem

    def __post_init__(self):
        ps = {getattr(self, f.name).p for f in fields(self)}
        if len(ps) != 1:
            raise ValueError(f"coefficients from several fields: {sorted(ps)}")
        if not self.alpha or not self.beta:
            raise ValueError("alpha and beta must be nonzero")

    @classmethod
    def make(cls, p: int, alpha=1, beta=1, gamma=0, alpha1=0, alpha2=0, beta1=0, beta2=0) -> QuadCoeffs:
        K = field(p)
        return cls(alpha=K(alpha), alpha1=K(alpha1), alpha2=K(alpha2), gamma=K(gamma),
                   beta=K(beta), beta1=K(beta1), beta2=K(beta2))

    @classmethod
    def identity(cls, p: int) -> QuadCoeffs:
        return cls.make(p)

    @property
    def p(self) -> int:
        return self.alpha.p

    def key(self) -> tuple[int, ...]:
        """Values in enumeration order ``(alpha, beta, gamma, alpha1, alpha2, beta1, beta2)``."""
        return tuple(getattr(self, name).value for name in _QUAD_ORDER)

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name).value for name in _QUAD_ORDER}

    def is_identity(self) -> bool:
        return self.key() == (1, 1, 0, 0, 0, 0, 0)

    def scalar_law_holds(self) -> bool:
        return self.beta ** 3 == self.alpha ** 2


def quad_to_polys(q: QuadCoeffs) -> tuple[BivarPoly, BivarPoly]:
    p = q.p
    f = BivarPoly({(1, 0): q.alpha, (0, 2): q.alpha1, (1, 1): q.alpha2}, p)
    g = BivarPoly({(1, 0): q.gamma, (0, 1): q.beta, (0, 2): q.beta1, (1, 1): q.beta2}, p)
    return f, g


def apply_equivalence(P: MatPair, q: QuadCoeffs) -> MatPair:
    """The pair ``(f(A, B), g(A, B))`` for the substitution encoded by ``q``."""
    if q.p != P.p:
        raise ValueError(f"GF({q.p}) coefficients applied to a GF({P.p}) pair")
    if not check_n23(P):
        raise NotInN23Error("apply_equivalence expects a pair in N23")
    f, g = quad_to_polys(q)
    return MatPair(eval_poly_pair(f, P), eval_poly_pair(g, P))


def quad_count(p: int) -> int:
    return (p - 1) ** 2 * p ** 5


def enumerate_quad_coeffs(ctx: FieldCtx | int) -> Iterator[QuadCoeffs]:
    """All quadratic substitutions over GF(p), lexicographic in
    ``(alpha, beta, gamma, alpha1, alpha2, beta1, beta2)``."""
    p = ctx.p if isinstance(ctx, FieldCtx) else int(ctx)
    nonzero = range(1, p)
    for a, b, c, a1, a2, b1, b2 in itertools.product(nonzero, nonzero, *[range(p)] * 5):
        yield QuadCoeffs.make(p, alpha=a, beta=b, gamma=c, alpha1=a1, alpha2=a2, beta1=b1, beta2=b2)


def is_nilpotent(M: Mat) -> bool:
    return mat_pow(M, M.rows).is_zero() if M.rows else True


def is_in_N(P: MatPair) -> bool:
    """Commuting pair of nilpotent matrices."""
    return check_commuting(P) and is_nilpotent(P.A) and is_nilpotent(P.B)
