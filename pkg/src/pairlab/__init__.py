"""Exact machinery for polynomial similarity of commuting nilpotent matrix pairs over GF(p)."""

from .construction import (
    BasePair,
    P0Pair,
    build_E1_pair,
    build_P0,
    build_T,
    build_W,
    is_in_E1,
    lift_similarity,
    p0_layout,
)
from .field import FieldCtx, FieldElem, ff_add, ff_inv, ff_mul, ff_neg, field
from .lemma import build_A0f_B0g, build_D, build_U, build_U_inv, build_Z, verify_lemma1
from .linalg import (
    BlockLayout,
    Mat,
    assemble_blocks,
    extract_block,
    is_nilpotent_with_index,
    kernel_basis,
    mat_add,
    mat_inverse,
    mat_mul,
    mat_scale,
    rref,
)
from .pairs import (
    BivarPoly,
    MatPair,
    QuadCoeffs,
    apply_equivalence,
    check_admissible,
    check_commuting,
    check_n23,
    enumerate_quad_coeffs,
    eval_poly_pair,
    quad_to_polys,
)
from .similarity import (
    IntertwinerSpace,
    SimilarityVerdict,
    are_poly_similar,
    are_similar_pairs,
    conjugate_pair,
    find_invertible,
    intertwiner_space,
    pair_rank_profile,
)
from .theorem import (
    TheoremInstance,
    check_proof_equations,
    recover_base_similarity,
    verify_converse,
    verify_e1_wildness,
    verify_forward,
)

__version__ = "0.1.0"
