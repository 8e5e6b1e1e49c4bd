"""Normalising ``q(P0)`` back to ``A0`` by an explicit conjugation chain.

For a substitution ``q`` the pair ``(A0f, B0g) = q(P0(M, N))`` is conjugated
first by ``D = diag(U, I, I)`` (coarse stripes 1-3 | 4 | 5-7), which turns
``A0f`` back into ``A0``, then by the scalar matrix
``Z = diag(beta, 1, 1, beta, beta, 1, 1)`` (fine stripes).  The result
``(A0, B0hat)`` has ``I`` at (1,3), ``beta^2/alpha I`` at (2,5),
``beta/alpha T`` at (3,6), ``W`` at (4,6) and ``I`` at (5,7); blocks
(1,5), (1,6), (1,7), (2,6), (2,7), (3,7) are free and all others vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .construction import BasePair, build_A0, build_P0, build_T, build_W, p0_layout
from .linalg import BlockLayout, Mat, assemble_blocks, block_diag, extract_block, mat_inverse
from .pairs import MatPair, QuadCoeffs, apply_equivalence

# blocks of B0hat whose value the normal form leaves unspecified
FREE_BLOCKS = frozenset({(1, 5), (1, 6), (1, 7), (2, 6), (2, 7), (3, 7)})


def build_A0f_B0g(base: BasePair, q: QuadCoeffs) -> MatPair:
    """``q(P0(base))`` assembled directly from its block form."""
    n, p = base.n, base.p
    I2 = Mat.identity(2 * n, p)
    T = build_T(base)
    a, a1, a2 = q.alpha, q.alpha1, q.alpha2
    c, b, b1, b2 = q.gamma, q.beta, q.beta1, q.beta2
    layout = p0_layout(n)
    A0f = assemble_blocks(layout, {
        (1, 5): a * I2, (1, 6): a1 * T, (1, 7): a2 * I2,
        (2, 6): a * I2, (2, 7): a1 * I2,
        (3, 7): a * I2,
    }, p)
    B0g = assemble_blocks(layout, {
        (1, 3): b * I2, (1, 5): c * I2, (1, 6): b1 * T, (1, 7): b2 * I2,
        (2, 5): b * I2, (2, 6): c * I2, (2, 7): b1 * I2,
        (3, 6): b * T, (3, 7): c * I2,
        (4, 6): b * build_W(n, p),
        (5, 7): b * I2,
    }, p)
    return MatPair(A0f, B0g)


def a0f_b0g_by_evaluation(base: BasePair, q: QuadCoeffs) -> MatPair:
    return apply_equivalence(build_P0(base).pair, q)


def _u_layout(T: Mat) -> BlockLayout:
    s = T.rows
    return BlockLayout.square([s, s, s])


def build_U(q: QuadCoeffs, T: Mat) -> Mat:
    if not q.alpha:
        raise ValueError("U needs alpha != 0")
    p = T.p
    I = Mat.identity(T.rows, p)
    a, a1, a2 = q.alpha, q.alpha1, q.alpha2
    return assemble_blocks(_u_layout(T), {
        (1, 1): a * I, (1, 2): a1 * T, (1, 3): a2 * I,
        (2, 2): a * I, (2, 3): a1 * I,
        (3, 3): a * I,
    }, p)


def build_U_inv(q: QuadCoeffs, T: Mat) -> Mat:
    """Closed-form inverse of :func:`build_U`."""
    if not q.alpha:
        raise ValueError("U needs alpha != 0")
    p = T.p
    I = Mat.identity(T.rows, p)
    a, a1, a2 = q.alpha, q.alpha1, q.alpha2
    ia = a ** -1
    return assemble_blocks(_u_layout(T), {
        (1, 1): ia * I, (1, 2): (-a1 * ia * ia) * T,
        (1, 3): (a1 * a1 * ia ** 3) * T - (a2 * ia * ia) * I,
        (2, 2): ia * I, (2, 3): (-a1 * ia * ia) * I,
        (3, 3): ia * I,
    }, p)


def build_D(q: QuadCoeffs, T: Mat, layout: BlockLayout) -> Mat:
    """``diag(U, I, I)`` on the coarse stripes (1-3 | 4 | 5-7) of ``layout``."""
    U = build_U(q, T)
    s = layout.row_stripes
    rest = sum(s[3:])
    if U.rows != sum(s[:3]):
        raise ValueError("U does not fit the first three stripes")
    return block_diag([U, Mat.identity(rest, T.p)])


def build_Z(beta, layout: BlockLayout) -> Mat:
    """``diag(beta I, I, I, beta I, beta I, I, I)`` on the seven stripes."""
    if not beta:
        raise ValueError("Z needs beta != 0")
    p = beta.p
    scales = [beta, 1, 1, beta, beta, 1, 1]
    return block_diag([Mat.scalar(s, c, p) for s, c in zip(layout.row_stripes, scales)])


def normalizing_conjugator(base: BasePair, q: QuadCoeffs) -> Mat:
    """``C = D Z``; ``C^-1 q(P0(base)) C`` is in normal form."""
    layout = p0_layout(base.n)
    return build_D(q, build_T(base), layout) @ build_Z(q.beta, layout)


def expected_blocks(base: BasePair, q: QuadCoeffs) -> dict[tuple[int, int], Mat]:
    n, p = base.n, base.p
    I2 = Mat.identity(2 * n, p)
    a, b = q.alpha, q.beta
    return {
        (1, 3): I2,
        (2, 5): (b * b / a) * I2,
        (3, 6): (b / a) * build_T(base),
        (4, 6): build_W(n, p),
        (5, 7): I2,
    }


@dataclass
class Lemma1Trace:
    A0f: Mat
    B0g: Mat
    U: Mat
    U_inv: Mat
    D: Mat
    Z: Mat
    after_D: MatPair
    final: MatPair
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_lemma1(base: BasePair, q: QuadCoeffs) -> tuple[bool, Lemma1Trace]:
    n, p = base.n, base.p
    layout = p0_layout(n)
    T = build_T(base)
    direct = build_A0f_B0g(base, q)
    U, U_inv = build_U(q, T), build_U_inv(q, T)
    D, Z = build_D(q, T, layout), build_Z(q.beta, layout)
    Di, Zi = mat_inverse(D), mat_inverse(Z)
    after_D = MatPair(Di @ direct.A @ D, Di @ direct.B @ D)
    final = MatPair(Zi @ after_D.A @ Z, Zi @ after_D.B @ Z)
    trace = Lemma1Trace(direct.A, direct.B, U, U_inv, D, Z, after_D, final)
    fail = trace.failures

    if a0f_b0g_by_evaluation(base, q) != direct:
        fail.append("block form of q(P0) disagrees with polynomial evaluation")
    I6 = Mat.identity(6 * n, p)
    if U @ U_inv != I6 or U_inv @ U != I6:
        fail.append("closed-form U^-1 is not the inverse of U")
    A0 = build_A0(n, p)
    if after_D.A != A0:
        fail.append("D^-1 A0f D != A0")
    if final.A != A0:
        fail.append("Z^-1 A0 Z != A0")
    want = expected_blocks(base, q)
    for i in range(1, 8):
        for j in range(1, 8):
            if (i, j) in FREE_BLOCKS:
                continue
            got = extract_block(final.B, layout, i, j)
            if (i, j) in want:
                if got != want[(i, j)]:
                    fail.append(f"block ({i}, {j}) of the normal form is wrong")
            elif not got.is_zero():
                fail.append(f"block ({i}, {j}) of the normal form should vanish")
    return trace.ok, trace
