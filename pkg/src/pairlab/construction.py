"""The explicit matrices of the wildness construction.

For a base pair ``(M, N)`` of ``n x n`` matrices:

* ``T = [[0, M], [I, N]]`` (``2n x 2n``) and ``W = [0 | I]`` (``n x 2n``);
* ``P0(M, N) = (A0, B0)`` of size ``13n`` on the seven-stripe layout
  ``[2n, 2n, 2n, n, 2n, 2n, 2n]``, with ``A0`` carrying identities at blocks
  (1,5), (2,6), (3,7) and ``B0`` carrying identities at (1,3), (2,5), (5,7),
  ``T`` at (3,6) and ``W`` at (4,6);
* the unitriangular pair ``(P, Q)`` of size ``3n`` used for unipotent bases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import (
    BlockLayout,
    DimensionError,
    Mat,
    assemble_blocks,
    block_diag,
    is_invertible,
    mat_inverse,
    mat_pow,
)
from .pairs import MatPair


class LiftError(ValueError):
    """A proposed base conjugator does not conjugate the bases."""


@dataclass(frozen=True)
class BasePair:
    M: Mat
    N: Mat

    def __post_init__(self):
        if not (self.M.is_square and self.M.shape == self.N.shape):
            raise DimensionError(f"base pair needs equal square matrices, got {self.M.shape}, {self.N.shape}")
        if self.M.p != self.N.p:
            raise ValueError("base pair mixes fields")

    @property
    def n(self) -> int:
        return self.M.rows

    @property
    def p(self) -> int:
        return self.M.p

    def as_pair(self) -> MatPair:
        return MatPair(self.M, self.N)

    def conjugate(self, X: Mat) -> BasePair:
        """``(X^-1 M X, X^-1 N X)``."""
        Xi = mat_inverse(X)
        return BasePair(Xi @ self.M @ X, Xi @ self.N @ X)


def p0_layout(n: int) -> BlockLayout:
    return BlockLayout.square([2 * n, 2 * n, 2 * n, n, 2 * n, 2 * n, 2 * n])


@dataclass(frozen=True)
class P0Pair:
    pair: MatPair
    layout: BlockLayout
    base: BasePair

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def A(self) -> Mat:
        return self.pair.A

    @property
    def B(self) -> Mat:
        return self.pair.B


def build_T(base: BasePair) -> Mat:
    n, p = base.n, base.p
    layout = BlockLayout.square([n, n])
    return assemble_blocks(layout, {(1, 2): base.M, (2, 1): Mat.identity(n, p), (2, 2): base.N}, p)


def build_W(n: int, p: int) -> Mat:
    if n < 1:
        raise ValueError("W needs n >= 1")
    return assemble_blocks(BlockLayout([n], [n, n]), {(1, 2): Mat.identity(n, p)}, p)


def build_A0(n: int, p: int) -> Mat:
    I2 = Mat.identity(2 * n, p)
    return assemble_blocks(p0_layout(n), {(1, 5): I2, (2, 6): I2, (3, 7): I2}, p)


def build_P0(base: BasePair) -> P0Pair:
    n, p = base.n, base.p
    layout = p0_layout(n)
    I2 = Mat.identity(2 * n, p)
    B0 = assemble_blocks(
        layout,
        {(1, 3): I2, (2, 5): I2, (5, 7): I2, (3, 6): build_T(base), (4, 6): build_W(n, p)},
        p,
    )
    return P0Pair(MatPair(build_A0(n, p), B0), layout, base)


def build_E1_pair(base: BasePair) -> MatPair:
    n, p = base.n, base.p
    layout = BlockLayout.square([n, n, n])
    I = Mat.identity(n, p)
    diag = {(k, k): I for k in (1, 2, 3)}
    P = assemble_blocks(layout, {**diag, (1, 2): I, (2, 3): I}, p)
    Q = assemble_blocks(layout, {**diag, (1, 2): base.M, (2, 3): base.N}, p)
    return MatPair(P, Q)


def is_unipotent(M: Mat) -> bool:
    n = M.rows
    return mat_pow(M - Mat.identity(n, M.p), n).is_zero()


def is_in_E1(base: BasePair) -> bool:
    """Both base matrices have 1 as their only eigenvalue."""
    return is_unipotent(base.M) and is_unipotent(base.N)


def lift_similarity(X: Mat, base1: BasePair, base2: BasePair) -> Mat:
    """Conjugator of ``P0(base1)`` onto ``P0(base2)`` induced by ``X^-1 base1 X = base2``.

    Returns ``diag(X2, X2, X2, X, X2, X2, X2)`` with ``X2 = diag(X, X)``; the
    result is checked by explicit conjugation and :class:`LiftError` raised if
    ``X`` does not conjugate the bases.
    """
    if base1.n != base2.n or X.shape != (base1.n, base1.n):
        raise DimensionError("conjugator and bases disagree in size")
    if not is_invertible(X):
        raise LiftError("base conjugator is singular")
    X2 = block_diag([X, X])
    S = block_diag([X2, X2, X2, X, X2, X2, X2])
    P1, P2 = build_P0(base1), build_P0(base2)
    Si = mat_inverse(S)
    if Si @ P1.A @ S != P2.A or Si @ P1.B @ S != P2.B:
        raise LiftError("X does not conjugate base1 onto base2")
    return S
