"""Conditional two-particle entanglement toolkit for triorthogonal n-qubit states."""

from .qlinalg import (
    BadNorm,
    BadSubset,
    DensityMatrix,
    NotHermitian,
    PureState,
    hermitian_eigen,
    partial_trace,
    spin_operator,
    tensor_product,
)
from .states import (
    ConditionalResult,
    Direction,
    TriorthogonalSpec,
    ZeroProbability,
    branch_probability,
    condition_on,
    conditional_closed_form,
    make_triorthogonal,
    reduced_density,
    rotated_ket,
)
from .correlations import (
    CorrelationRecord,
    DimensionMismatch,
    conditional_correlation_closed,
    conditional_probability,
    expectation,
    spin_product_operator,
    unconditional_correlation_closed,
)
from .bell import (
    ChshSettings,
    HardySettings,
    ViolationReport,
    chsh_condition_lhs,
    chsh_lambda_closed,
    chsh_operator,
    chsh_special_case_lhs,
    flip_first_particle,
    hardy_lambda_closed,
    hardy_operator,
    included_angle,
    maximal_family,
    optimize_settings,
    oriented_included_angles,
    singlet_equality_lhs,
    triplet_equality_lhs,
)
from .experiment import (
    EmptySubensemble,
    SubensembleStats,
    outcome_probabilities,
    postselect,
    sample_shots,
)

__all__ = [name for name in dir() if not name.startswith("_")]
