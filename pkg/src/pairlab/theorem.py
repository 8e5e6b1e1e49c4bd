"""End-to-end checks that polynomial similarity of ``P0`` pairs forces base similarity.

Conventions: a *source* base is the one whose ``P0`` is transformed by a
substitution ``q``, the *target* base is left alone.  A similarity witness
``S`` for ``q(P0(src)) ~ P0(tgt)`` satisfies ``S^-1 q(P0(src)) S = P0(tgt)``.
After normalisation ``S <- C^-1 S`` (``C`` the normalising conjugator for
``src`` and ``q``) it satisfies

    A0 S = S A0,    B0hat(src) S = S B0(tgt),

and its blocks obey

    W Y22 = Y44 W,    beta^3 T_src Y22 = alpha^2 Y22 T_tgt,

forcing ``Y22 = [[Z11, 0], [0, Z22]]`` and, for unipotent bases,
``beta^3 = alpha^2`` and ``Z22^-1 (M, N)_src Z22 = (M, N)_tgt``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .construction import (
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
from .field import field as gf
from .lemma import build_A0f_B0g, normalizing_conjugator, verify_lemma1
from .linalg import BlockLayout, Mat, extract_block, mat_inverse, rank
from .pairs import QuadCoeffs, apply_equivalence
from .similarity import (
    DEFAULT_BUDGET,
    EXHAUSTIVE_THRESHOLD,
    SimilarityTarget,
    SimilarityVerdict,
    _QuadEvaluator,
    are_poly_similar,
    are_similar_pairs,
)

log = logging.getLogger(__name__)


class TheoremViolation(AssertionError):
    """A computed instance contradicts the theorem; always an implementation bug."""


class ProofShapeError(AssertionError):
    """A normalised witness violates a block identity derived in the proof."""

    def __init__(self, message: str, block: Optional[tuple[int, int]] = None):
        super().__init__(message if block is None else f"{message} at block {block}")
        self.block = block


class ScalarLawError(ValueError):
    pass


@dataclass(frozen=True)
class TheoremInstance:
    base1: BasePair
    base2: BasePair

    def __post_init__(self):
        if self.base1.n != self.base2.n or self.base1.p != self.base2.p:
            raise ValueError("instance bases differ in size or field")
        if not (is_in_E1(self.base1) and is_in_E1(self.base2)):
            raise ValueError("instance bases must be unipotent")

    @property
    def n(self) -> int:
        return self.base1.n

    @property
    def p(self) -> int:
        return self.base1.p


@dataclass
class ProofTrace:
    S: Mat
    Y: dict[tuple[int, int], Mat]
    Z11: Mat
    Z12: Mat
    Z21: Mat
    Z22: Mat
    alpha: object
    beta: object
    scalar_law: bool


def normalize_witness(S: Mat, source: BasePair, q: QuadCoeffs) -> Mat:
    """Turn a witness for ``q(P0(src)) ~ P0(tgt)`` into one for ``(A0, B0hat(src)) ~ P0(tgt)``."""
    return mat_inverse(normalizing_conjugator(source, q)) @ S


def _fail(message: str, block=None):
    raise ProofShapeError(message, block)


def check_proof_equations(S: Mat, source: BasePair, target: BasePair, q: QuadCoeffs) -> ProofTrace:
    """Check the block structure of a *normalised* witness ``S``."""
    n, p = source.n, source.p
    layout = p0_layout(n)
    P_src = build_P0(source)
    P_tgt = build_P0(target)
    C = normalizing_conjugator(source, q)
    Ci = mat_inverse(C)
    Bhat = Ci @ build_A0f_B0g(source, q).B @ C
    A0 = P_tgt.A
    if S.shape != A0.shape or rank(S) != S.rows:
        raise ValueError("witness must be an invertible matrix of the P0 size")
    if A0 @ S != S @ A0:
        raise ValueError("witness does not commute with A0")
    if Bhat @ S != S @ P_tgt.B:
        raise ValueError("witness does not intertwine B0hat(src) with B0(tgt)")

    blk = {(i, j): extract_block(S, layout, i, j) for i in range(1, 8) for j in range(1, 8)}
    # shape (a): coarse stripes 1-3 | 4 | 5-7 are block upper triangular with equal corners
    for i in range(4, 8):
        for j in range(1, 4):
            if not blk[(i, j)].is_zero():
                _fail("shape (a): nonzero below the diagonal", (i, j))
    for i in range(5, 8):
        if not blk[(i, 4)].is_zero():
            _fail("shape (a): nonzero below the diagonal", (i, 4))
    for i in range(1, 4):
        for j in range(1, 4):
            if blk[(i + 4, j + 4)] != blk[(i, j)]:
                _fail("shape (a): corner blocks differ", (i + 4, j + 4))
    # shape (b): the leading 3x3 stripe block is upper triangular with Y33 = Y11
    for i, j in ((2, 1), (3, 1), (3, 2)):
        if not blk[(i, j)].is_zero():
            _fail("shape (b): nonzero below the diagonal", (i, j))
    if blk[(3, 3)] != blk[(1, 1)]:
        _fail("shape (b): Y33 != Y11", (3, 3))

    a, b = q.alpha, q.beta
    Y11, Y22, Y44 = blk[(1, 1)], blk[(2, 2)], blk[(4, 4)]
    T_src, T_tgt = build_T(source), build_T(target)
    W = build_W(n, p)
    if not blk[(3, 4)].is_zero():
        _fail("Y34 != 0", (3, 4))
    if (b * b / a) * Y11 != Y22:
        _fail("beta^2/alpha Y11 != Y22", (2, 5))
    if (b / a) * (T_src @ Y22) != Y11 @ T_tgt + blk[(3, 4)] @ W:
        _fail("beta/alpha T_src Y22 != Y11 T_tgt + Y34 W", (3, 6))
    if W @ Y22 != Y44 @ W:
        _fail("W Y22 != Y44 W", (4, 6))
    if (b ** 3) * (T_src @ Y22) != (a * a) * (Y22 @ T_tgt):
        _fail("beta^3 T_src Y22 != alpha^2 Y22 T_tgt", (3, 6))

    zl = BlockLayout.square([n, n])
    Z = {(i, j): extract_block(Y22, zl, i, j) for i in (1, 2) for j in (1, 2)}
    if not Z[(2, 1)].is_zero():
        _fail("Z21 != 0", (2, 2))
    if not Z[(1, 2)].is_zero():
        _fail("Z12 != 0", (2, 2))
    if (b ** 3) * Z[(1, 1)] != (a * a) * Z[(2, 2)]:
        _fail("beta^3 Z11 != alpha^2 Z22", (2, 2))
    return ProofTrace(S, blk, Z[(1, 1)], Z[(1, 2)], Z[(2, 1)], Z[(2, 2)], a, b, b ** 3 == a * a)


def recover_base_similarity(S: Mat, q: QuadCoeffs, source: BasePair, target: BasePair,
                            *, normalized: bool = False) -> Mat:
    """Base conjugator ``X`` with ``X^-1 (M, N)_src X = (M, N)_tgt`` read off a witness.

    ``S`` is a witness for ``q(P0(src)) ~ P0(tgt)``; it is normalised first
    unless ``normalized`` is set.  ``X`` is the lower-right ``n x n`` part of
    the ``Y22`` block.
    """
    if not q.scalar_law_holds():
        raise ScalarLawError(f"beta^3 != alpha^2 for {q.as_dict()}")
    n = source.n
    Sn = S if normalized else normalize_witness(S, source, q)
    Y22 = extract_block(Sn, p0_layout(n), 2, 2)
    X = extract_block(Y22, BlockLayout.square([n, n]), 2, 2)
    if rank(X) != n:
        raise TheoremViolation("recovered base conjugator is singular")
    Xi = mat_inverse(X)
    if Xi @ source.M @ X != target.M or Xi @ source.N @ X != target.N:
        raise TheoremViolation("recovered X does not conjugate the source base onto the target")
    return X


def verify_forward(instance: TheoremInstance, X: Mat, budget: int = DEFAULT_BUDGET, seed: int = 0) -> bool:
    """Base similarity by ``X`` lifts to polynomial similarity with the identity substitution."""
    b1, b2 = instance.base1, instance.base2
    try:
        S = lift_similarity(X, b1, b2)
    except LiftError:
        return False
    P1, P2 = build_P0(b1).pair, build_P0(b2).pair
    Si = mat_inverse(S)
    if Si @ P1.A @ S != P2.A or Si @ P1.B @ S != P2.B:
        return False
    res = are_poly_similar(P1, P2, budget, seed)
    return bool(res.similar) and res.coeffs.is_identity()


@dataclass
class WitnessRecord:
    coeffs: QuadCoeffs
    trace: ProofTrace
    recovered: Mat


@dataclass
class ConverseReport:
    poly_similar: Optional[bool]
    base_similar: Optional[bool]
    certified: bool
    coeffs: Optional[QuadCoeffs] = None
    witnesses: list[WitnessRecord] = field(default_factory=list)
    probe_similar: int = 0
    probe_total: int = 0
    checked: int = 0

    @property
    def scalar_law(self) -> bool:
        return all(w.coeffs.scalar_law_holds() for w in self.witnesses)


def _examine_witness(S: Mat, q: QuadCoeffs, src: BasePair, tgt: BasePair) -> WitnessRecord:
    Sn = normalize_witness(S, src, q)
    trace = check_proof_equations(Sn, src, tgt, q)
    if not trace.scalar_law:
        raise TheoremViolation(f"witness {q.as_dict()} breaks beta^3 = alpha^2 on unipotent bases")
    X = recover_base_similarity(Sn, q, src, tgt, normalized=True)
    return WitnessRecord(q, trace, X)


def verify_converse(instance: TheoremInstance, budget: int = DEFAULT_BUDGET, seed: int = 0, *,
                    threshold: int = EXHAUSTIVE_THRESHOLD,
                    coeffs: Optional[Iterable[QuadCoeffs]] = None,
                    probe: Iterable[QuadCoeffs] = ()) -> ConverseReport:
    """Check that polynomial similarity of ``P0(base1)``, ``P0(base2)`` implies base similarity.

    ``coeffs`` restricts the substitution search (default: all of them).
    Each substitution in ``probe`` is additionally tested on its own; every
    one found to be a witness is normalised and checked like the main witness.
    """
    b1, b2 = instance.base1, instance.base2
    base = are_similar_pairs(b1.as_pair(), b2.as_pair(), budget, seed, threshold=threshold)
    P1, P2 = build_P0(b1).pair, build_P0(b2).pair
    poly = are_poly_similar(P1, P2, budget, seed, threshold=threshold, coeffs=coeffs)
    report = ConverseReport(poly.similar, base.similar, poly.certified and base.certified,
                            coeffs=poly.coeffs, checked=poly.checked)
    if poly.similar and base.similar is False:
        raise TheoremViolation("P0 pairs are polynomially similar but the bases are not similar")
    if poly.similar:
        report.witnesses.append(_examine_witness(poly.witness, poly.coeffs, b1, b2))
    probe = list(probe)
    if probe:
        target = SimilarityTarget(P2, budget=budget, seed=seed, threshold=threshold)
        evaluate = _QuadEvaluator(P1)
        for q in probe:
            v = target.check(evaluate(q))
            report.probe_total += 1
            if v.similar:
                if base.similar is False:
                    raise TheoremViolation(f"substitution {q.as_dict()} makes P0 pairs similar over non-similar bases")
                report.probe_similar += 1
                report.witnesses.append(_examine_witness(v.witness, q, b1, b2))
    return report


@dataclass
class E1Report:
    base: SimilarityVerdict
    e1: SimilarityVerdict

    @property
    def consistent(self) -> bool:
        return self.base.similar == self.e1.similar

    @property
    def certified(self) -> bool:
        return self.base.certified and self.e1.certified


def verify_e1_wildness(base1: BasePair, base2: BasePair, budget: int = DEFAULT_BUDGET,
                       seed: int = 0, *, threshold: int = EXHAUSTIVE_THRESHOLD) -> E1Report:
    """Similarity of the unitriangular pairs built on two bases matches that of the bases."""
    if not (is_in_E1(base1) and is_in_E1(base2)):
        raise ValueError("bases must be unipotent")
    base = are_similar_pairs(base1.as_pair(), base2.as_pair(), budget, seed, threshold=threshold)
    e1 = are_similar_pairs(build_E1_pair(base1), build_E1_pair(base2), budget, seed, threshold=threshold)
    report = E1Report(base, e1)
    if report.certified and not report.consistent:
        raise TheoremViolation("unitriangular pair similarity disagrees with base similarity")
    return report


# ----------------------------------------------------------------------------
# instance generation


def random_unipotent(n: int, p: int, rng: np.random.Generator) -> Mat:
    """A random conjugate of a random upper unitriangular matrix."""
    U = np.triu(rng.integers(0, p, size=(n, n)), 1) + np.eye(n, dtype=np.int64)
    X = random_invertible(n, p, rng)
    return mat_inverse(X) @ Mat(U, p) @ X


def random_invertible(n: int, p: int, rng: np.random.Generator) -> Mat:
    while True:
        X = Mat(rng.integers(0, p, size=(n, n)), p)
        if rank(X) == n:
            return X


def random_e1_base(n: int, p: int, rng: np.random.Generator) -> BasePair:
    return BasePair(random_unipotent(n, p, rng), random_unipotent(n, p, rng))


def all_unipotent(n: int, p: int) -> list[Mat]:
    """Every unipotent ``n x n`` matrix over GF(p), by enumeration (tiny n, p only)."""
    import itertools

    out = []
    I = Mat.identity(n, p)
    for entries in itertools.product(range(p), repeat=n * n):
        M = Mat(np.array(entries).reshape(n, n), p)
        if ((M - I) ** n).is_zero():
            out.append(M)
    return out


def scalar_law_probe(p: int, rng: np.random.Generator, per_pair: int = 1) -> list[QuadCoeffs]:
    """Substitutions covering every ``(alpha, beta)`` with random remaining coefficients."""
    K = gf(p)
    out = []
    for a in range(1, p):
        for b in range(1, p):
            for _ in range(per_pair):
                rest = rng.integers(0, p, size=5)
                out.append(QuadCoeffs.make(p, alpha=a, beta=b, gamma=rest[0], alpha1=rest[1],
                                           alpha2=rest[2], beta1=rest[3], beta2=rest[4]))
    return out
