"""Exact evaluation of fundamental tensor invariants via obstruction designs."""

from .designs import (
    Diagonal,
    DesignError,
    ObstructionDesign,
    apply_slice_permutation,
    build_box,
    delete_diagonal,
    design_type,
)
from .tensors import (
    TensorDecomposition,
    Term,
    canonical_labeling_I0,
    embed_matmul_tensor,
    from_basis_terms,
    embed_tensor,
    matmul_tensor,
    unit_tensor,
    vandermonde_tensor,
)
from .valuation import (
    BudgetExceeded,
    EquivalenceClass,
    Labeling,
    SignedCount,
    check_vanishing,
    enumerate_valid_classes,
    evaluate_invariant,
    evaluate_matmul_invariant,
    labeling_from_indices,
    signed_class_sum,
    signed_class_sum_naive,
    val,
    verify_equivariance,
)
from .latin import (
    LatinCube,
    LatinSquare,
    alon_tarsi_delta_3d,
    count_by_inclusion_exclusion,
    enumerate_latin_cubes,
    enumerate_latin_squares,
    hyperdet,
    hyperper,
    latin_cube_census,
    latin_square_delta,
    symbol_delta_by_inclusion_exclusion,
    unipotent_delta,
    unipotent_design_normalization,
)
from .kron import (
    character_value,
    kronecker_coefficient,
    rectangle_coefficient,
    rectangle_symmetry_check,
    rectangular_triple_positive,
)

__version__ = "0.1.0"
