"""Deciding simultaneous similarity of matrix pairs over GF(p).

Two pairs are similar iff their intertwiner space contains an invertible
element.  The space is computed exactly as a kernel; the search for an
invertible element is exhaustive (certified) when the space is small and
random otherwise, with a Schwartz-Zippel failure bound.

When both pairs act nilpotently (every long enough word in ``A, B``
vanishes), an intertwiner is invertible iff its induced map on the top
``V / (AV + BV)`` is, by Nakayama's lemma.  The search then runs over the
much smaller space of induced top maps; verdicts stay certified.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .linalg import (
    DimensionError,
    Mat,
    _kernel_rows,
    _matmul,
    _rref_array,
    batch_invertible,
    mat_inverse,
    mat_pow,
    rank,
)
from .field import inv_mod
from .pairs import (
    MatPair,
    NotInN23Error,
    QuadCoeffs,
    check_n23,
    enumerate_quad_coeffs,
)

log = logging.getLogger(__name__)

EXHAUSTIVE_THRESHOLD = 2_000_000
DEFAULT_BUDGET = 64
_CHUNK = 1 << 15

SIMILAR = "similar"
NOT_SIMILAR = "not-similar-certified"
NOT_SIMILAR_PROBABLY = "not-similar-probabilistic"
INCONCLUSIVE = "inconclusive"


class WitnessError(AssertionError):
    """A claimed witness failed re-verification; indicates a bug."""


@dataclass(frozen=True)
class IntertwinerSpace:
    """Basis of ``{S : A2 S = S A1, B2 S = S B1}`` for pairs ``P1``, ``P2``."""

    n: int
    p: int
    stack: np.ndarray  # (dim, n, n)

    @property
    def dim(self) -> int:
        return self.stack.shape[0]

    @property
    def basis(self) -> list[Mat]:
        return [Mat._wrap(s.copy(), self.p) for s in self.stack]

    def combine(self, coeffs) -> Mat:
        c = np.asarray(coeffs, dtype=np.int64) % self.p
        if self.dim == 0:
            return Mat.zeros(self.n, self.n, self.p)
        return Mat._wrap(np.tensordot(c, self.stack, axes=1) % self.p, self.p)


def _intertwiner_rows(A1: np.ndarray, A2: np.ndarray, p: int) -> np.ndarray:
    # row-major vec: vec(A2 S) = (A2 (x) I) vec S, vec(S A1) = (I (x) A1^T) vec S
    n = A1.shape[0]
    eye = np.eye(n, dtype=np.int64)
    return (np.kron(A2, eye) - np.kron(eye, A1.T)) % p


def intertwiner_space(P1: MatPair, P2: MatPair) -> IntertwinerSpace:
    """All ``S`` with ``A2 S = S A1`` and ``B2 S = S B1``."""
    if P1.n != P2.n:
        raise DimensionError(f"pairs of sizes {P1.n} and {P2.n}")
    if P1.p != P2.p:
        raise ValueError("pairs over different fields")
    n, p = P1.n, P1.p
    # solve the A-equation first, then the B-equation on its solution space
    first = _kernel_rows(_intertwiner_rows(P1.A.a, P2.A.a, p), p)
    if first.shape[0]:
        LB = _intertwiner_rows(P1.B.a, P2.B.a, p)
        restricted = _matmul(LB, first.T, p)
        coeffs = _kernel_rows(restricted, p)
        sols = _matmul(coeffs, first, p)
    else:
        sols = first
    return IntertwinerSpace(n, p, sols.reshape(-1, n, n))


# ----------------------------------------------------------------------------
# top quotients


def _row_space(vectors: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    r, piv = _rref_array(vectors.copy(), p)
    return r[: len(piv)], piv


def radical_chain_terminates(P: MatPair) -> bool:
    """True iff every word of length ``n`` in ``A, B`` is zero."""
    n, p = P.n, P.p
    cur = np.eye(n, dtype=np.int64)  # rows span the current subspace
    for _ in range(n + 1):
        if cur.shape[0] == 0:
            return True
        images = np.vstack([_matmul(cur, P.A.a.T, p), _matmul(cur, P.B.a.T, p)])
        cur, _ = _row_space(images, p)
    return cur.shape[0] == 0


@dataclass(frozen=True)
class TopQuotient:
    """Projection onto ``V / (AV + BV)`` and a section of it."""

    projection: np.ndarray  # (t, n): rows annihilate AV + BV
    section: np.ndarray  # (n, t): columns span a complement of AV + BV

    @property
    def dim(self) -> int:
        return self.projection.shape[0]


def top_quotient(P: MatPair) -> Optional[TopQuotient]:
    """Top quotient data, or ``None`` when the pair does not act nilpotently."""
    if not radical_chain_terminates(P):
        return None
    n, p = P.n, P.p
    rad = np.hstack([P.A.a, P.B.a]).T  # rows span AV + BV
    basis, piv = _row_space(rad, p)
    proj = _kernel_rows(basis, p) if basis.shape[0] else np.eye(n, dtype=np.int64)
    is_piv = np.zeros(n, dtype=bool)
    is_piv[piv] = True
    section = np.eye(n, dtype=np.int64)[:, ~is_piv]
    return TopQuotient(proj, section)


def _single_eigenvalue(M: Mat) -> Optional[int]:
    n, p = M.rows, M.p
    if n == 0:
        return 0
    if p <= 64:
        candidates = range(p)
    elif n % p:
        candidates = [int(np.trace(M.a)) * inv_mod(n, p) % p]
    else:
        return None
    for lam in candidates:
        if mat_pow(M - Mat.scalar(n, lam, p), n).is_zero():
            return lam
    return None


def shifted(P: MatPair, lam: int, mu: int) -> MatPair:
    n, p = P.n, P.p
    return MatPair(P.A - Mat.scalar(n, lam, p), P.B - Mat.scalar(n, mu, p))


def nilpotent_shift(P: MatPair) -> Optional[tuple[int, int]]:
    """Scalars ``(lam, mu)`` making ``(A - lam, B - mu)`` act nilpotently, if any."""
    lam, mu = _single_eigenvalue(P.A), _single_eigenvalue(P.B)
    if lam is None or mu is None:
        return None
    return (lam, mu) if radical_chain_terminates(shifted(P, lam, mu)) else None


# ----------------------------------------------------------------------------
# invertible elements


@dataclass
class SearchResult:
    witness: Optional[Mat]
    certified: bool
    method: str
    checked: int
    search_dim: int
    failure_bound: Optional[float] = None
    covered: int = 0  # span elements ruled out, zero and scalar multiples included

    @property
    def found(self) -> bool:
        return self.witness is not None


def _projective_vectors(d: int, p: int):
    """Coefficient vectors up to scaling (first nonzero entry 1), in chunks."""
    for lead in range(d):
        tail = d - lead - 1
        total = p**tail
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            block = np.zeros((idx.size, d), dtype=np.int64)
            block[:, lead] = 1
            for k in range(tail):
                block[:, d - 1 - k] = idx % p
                idx //= p
            yield block


def _independent_subset(stack: np.ndarray, p: int) -> list[int]:
    """Indices of a maximal linearly independent subfamily, earliest first."""
    if stack.shape[0] == 0:
        return []
    flat = stack.reshape(stack.shape[0], -1).T.copy()
    _, piv = _rref_array(flat, p)
    return piv


def find_invertible(
    space: IntertwinerSpace,
    budget: int = DEFAULT_BUDGET,
    rng_seed: int = 0,
    *,
    threshold: int = EXHAUSTIVE_THRESHOLD,
    reduced: Optional[np.ndarray] = None,
) -> SearchResult:
    """Look for an invertible element in the span of ``space``.

    ``reduced`` optionally gives, for each basis element, a square matrix whose
    invertibility is equivalent to that of the element (its induced top map)
    and which depends linearly on it.  Searching is done on these images.
    """
    p = space.p
    images = space.stack if reduced is None else reduced
    if images.shape[0] != space.dim:
        raise ValueError("reduced images must match the basis length")
    size = images.shape[1] if images.ndim == 3 else 0
    if space.dim == 0 or size == 0 and space.n > 0:
        return SearchResult(None, True, "exhaustive", 1, 0, covered=1)
    if space.n == 0:
        return SearchResult(Mat.zeros(0, 0, p), True, "exhaustive", 0, 0)

    keep = _independent_subset(images, p)
    sub, imgs = space.stack[keep], images[keep]
    d = len(keep)

    if p**d <= threshold:
        checked = 0
        for block in _projective_vectors(d, p):
            mats = np.tensordot(block, imgs, axes=1) % p
            ok = batch_invertible(mats, p)
            if ok.any():
                k = int(np.flatnonzero(ok)[0])
                checked += k + 1
                S = Mat._wrap(np.tensordot(block[k], sub, axes=1) % p, p)
                return SearchResult(S, True, "exhaustive", checked, d)
            checked += block.shape[0]
        return SearchResult(None, True, "exhaustive", checked, d, covered=p**d)

    rng = np.random.default_rng(rng_seed)
    checked = 0
    while checked < budget:
        m = min(_CHUNK, budget - checked)
        block = rng.integers(0, p, size=(m, d), dtype=np.int64)
        ok = batch_invertible(np.tensordot(block, imgs, axes=1) % p, p)
        if ok.any():
            k = int(np.flatnonzero(ok)[0])
            S = Mat._wrap(np.tensordot(block[k], sub, axes=1) % p, p)
            return SearchResult(S, True, "random", checked + k + 1, d)
        checked += m
    bound = (size / p) ** budget if size < p else None
    return SearchResult(None, False, "random", checked, d, bound)


# ----------------------------------------------------------------------------
# rank profiles

RANK_WORDS = (
    "A", "B", "A+B", "A-B", "AB-BA",
    "AA", "AB", "BA", "BB",
    "AAA", "AAB", "ABA", "ABB", "BAA", "BAB", "BBA", "BBB",
)


def pair_rank_profile(P: MatPair) -> list[int]:
    """Ranks of the fixed word list :data:`RANK_WORDS` evaluated at ``P``.

    Ranks are invariant under simultaneous conjugation, so unequal profiles
    prove non-similarity.  Equal profiles prove nothing.
    """
    A, B = P
    cache: dict[str, Mat] = {"A": A, "B": B}

    def word(w: str) -> Mat:
        if w not in cache:
            cache[w] = word(w[:-1]) @ cache[w[-1]]
        return cache[w]

    special = {"A+B": lambda: A + B, "A-B": lambda: A - B, "AB-BA": lambda: word("AB") - word("BA")}
    return [rank(special[w]() if w in special else word(w)) for w in RANK_WORDS]


# ----------------------------------------------------------------------------
# similarity verdicts


@dataclass
class SimilarityVerdict:
    outcome: str
    witness: Optional[Mat] = None
    reason: str = ""
    failure_bound: Optional[float] = None
    search: Optional[SearchResult] = None

    @property
    def similar(self) -> Optional[bool]:
        if self.outcome == SIMILAR:
            return True
        if self.outcome == NOT_SIMILAR:
            return False
        return None

    @property
    def certified(self) -> bool:
        return self.outcome in (SIMILAR, NOT_SIMILAR)


def conjugate_pair(P: MatPair, S: Mat) -> MatPair:
    """``(S^-1 A S, S^-1 B S)``; raises on singular ``S``."""
    Si = mat_inverse(S)
    return MatPair(Si @ P.A @ S, Si @ P.B @ S)


def _is_witness(S: Mat, P1: MatPair, P2: MatPair) -> bool:
    # S^-1 A1 S = A2  <=>  A1 S = S A2 for invertible S
    return rank(S) == S.rows and P1.A @ S == S @ P2.A and P1.B @ S == S @ P2.B


class SimilarityTarget:
    """A fixed pair ``P2`` with cached invariants, tested against many ``P1``.

    With ``prefilter=False`` the rank-profile, dimension and nilpotency
    shortcuts are skipped and every verdict comes from the intertwiner search.
    """

    def __init__(self, P2: MatPair, *, budget: int = DEFAULT_BUDGET, seed: int = 0,
                 threshold: int = EXHAUSTIVE_THRESHOLD, prefilter: bool = True):
        self.pair = P2
        self.budget = budget
        self.seed = seed
        self.threshold = threshold
        self.prefilter = prefilter
        self.profile = pair_rank_profile(P2) if prefilter else None
        self.shift = nilpotent_shift(P2)
        self.top = top_quotient(shifted(P2, *self.shift)) if self.shift is not None else None
        self._end_dim: Optional[int] = None

    @property
    def end_dim(self) -> int:
        if self._end_dim is None:
            self._end_dim = intertwiner_space(self.pair, self.pair).dim
        return self._end_dim

    def check(self, P1: MatPair) -> SimilarityVerdict:
        """Is ``P1`` similar to the target?  Witnesses satisfy ``S^-1 P1 S = P2``."""
        P2 = self.pair
        if P1.n != P2.n or P1.p != P2.p:
            raise DimensionError("pairs differ in size or field")
        if P1 == P2:
            return SimilarityVerdict(SIMILAR, Mat.identity(P1.n, P1.p), "identical")
        if self.prefilter and pair_rank_profile(P1) != self.profile:
            return SimilarityVerdict(NOT_SIMILAR, reason="rank-profile")
        # S in space  <=>  A1 S = S A2, i.e. S maps the P2-module to the P1-module
        space = intertwiner_space(P2, P1)
        if self.prefilter and space.dim != self.end_dim:
            return SimilarityVerdict(NOT_SIMILAR, reason="hom-dimension")
        reduced = None
        if self.top is not None:
            top1 = top_quotient(shifted(P1, *self.shift))
            if self.prefilter and top1 is None:
                return SimilarityVerdict(NOT_SIMILAR, reason="nilpotency")
            if self.prefilter and top1.dim != self.top.dim:
                return SimilarityVerdict(NOT_SIMILAR, reason="top-dimension")
            if top1 is not None and top1.dim == self.top.dim:
                proj, sec = top1.projection, self.top.section
                reduced = np.einsum("ij,djk,kl->dil", proj, space.stack, sec) % P1.p
        res = find_invertible(space, self.budget, self.seed, threshold=self.threshold, reduced=reduced)
        if res.found:
            if not _is_witness(res.witness, P1, P2):
                raise WitnessError("intertwiner search returned a non-witness")
            return SimilarityVerdict(SIMILAR, res.witness, f"{res.method}-search", search=res)
        if res.certified:
            return SimilarityVerdict(NOT_SIMILAR, reason="exhaustive-search", search=res)
        if res.failure_bound is not None:
            return SimilarityVerdict(NOT_SIMILAR_PROBABLY, reason="random-search",
                                     failure_bound=res.failure_bound, search=res)
        return SimilarityVerdict(INCONCLUSIVE, reason="random-search; size >= p leaves no bound", search=res)


def are_similar_pairs(P1: MatPair, P2: MatPair, budget: int = DEFAULT_BUDGET, seed: int = 0,
                      *, threshold: int = EXHAUSTIVE_THRESHOLD, prefilter: bool = True) -> SimilarityVerdict:
    """Decide whether ``S^-1 A1 S = A2`` and ``S^-1 B1 S = B2`` for some invertible ``S``."""
    return SimilarityTarget(P2, budget=budget, seed=seed, threshold=threshold, prefilter=prefilter).check(P1)


# ----------------------------------------------------------------------------
# polynomial similarity


@dataclass
class PolySimilarity:
    similar: Optional[bool]
    certified: bool
    coeffs: Optional[QuadCoeffs] = None
    witness: Optional[Mat] = None
    index: Optional[int] = None
    checked: int = 0
    outcomes: dict = field(default_factory=dict)


class _QuadEvaluator:
    """Fast ``apply_equivalence`` on a fixed N23 pair via precomputed monomials."""

    def __init__(self, P: MatPair):
        A, B = P
        self.p = P.p
        self.mono = {"x": A.a, "y": B.a, "yy": (B @ B).a, "xy": (A @ B).a}

    def __call__(self, q: QuadCoeffs) -> MatPair:
        m, p = self.mono, self.p
        f = (q.alpha.value * m["x"] + q.alpha1.value * m["yy"] + q.alpha2.value * m["xy"]) % p
        g = (q.gamma.value * m["x"] + q.beta.value * m["y"] + q.beta1.value * m["yy"]
             + q.beta2.value * m["xy"]) % p
        return MatPair(Mat._wrap(f, p), Mat._wrap(g, p))


def are_poly_similar(P1: MatPair, P2: MatPair, budget: int = DEFAULT_BUDGET, seed: int = 0, *,
                     threshold: int = EXHAUSTIVE_THRESHOLD,
                     coeffs: Optional[Iterable[QuadCoeffs]] = None,
                     prefilter: bool = True) -> PolySimilarity:
    """Search the quadratic substitutions ``q`` for one making ``q(P1)`` similar to ``P2``.

    The first witness in enumeration order is returned.  ``coeffs`` restricts
    the search to a given family; the verdict is then only about that family.
    A negative answer is certified only if every individual check was.
    """
    if P1.n != P2.n or P1.p != P2.p:
        raise DimensionError("pairs differ in size or field")
    if not (check_n23(P1) and check_n23(P2)):
        raise NotInN23Error("polynomial similarity is only decided for N23 pairs")
    if P1.is_zero() or P2.is_zero():
        # substitutions without constant term fix the zero pair
        return PolySimilarity(P1.is_zero() and P2.is_zero(), True)
    target = SimilarityTarget(P2, budget=budget, seed=seed, threshold=threshold, prefilter=prefilter)
    evaluate = _QuadEvaluator(P1)
    family = enumerate_quad_coeffs(P1.p) if coeffs is None else coeffs
    outcomes: dict[str, int] = {}
    certified = True
    for idx, q in enumerate(family):
        verdict = target.check(evaluate(q))
        outcomes[verdict.reason] = outcomes.get(verdict.reason, 0) + 1
        if verdict.similar:
            return PolySimilarity(True, True, q, verdict.witness, idx, idx + 1, outcomes)
        certified &= verdict.certified
    n_checked = sum(outcomes.values())
    return PolySimilarity(False if certified else None, certified, checked=n_checked, outcomes=outcomes)
