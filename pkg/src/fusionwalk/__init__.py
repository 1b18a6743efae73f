"""Fusion rings, their random walks, amenability certificates and
entropy bounds for inclusions of multi-matrix algebras."""

from . import _backend
from .amenability import (
    NormCertificate,
    Verdict,
    amenability_verdict,
    free_group_benchmark,
    gamma_norm_lower,
    verify_certificate,
    weak_amenability_probe,
)
from .entropy import (
    BlockState,
    GapBounds,
    Inclusion,
    MultiMatrixAlgebra,
    block_masses,
    decomposition_defect,
    entropy_gap_bounds,
    f_maximizer,
    f_simplex,
    h_bound_blocks,
    inclusion_norm,
    rel_entropy,
    restrict_state,
    two_log_norm_check,
    vn_entropy,
)
from .errors import *  # noqa: F403
from .families import FamilySpec, build, classical_su2_dims, quantum_su2_dims
from .ring import (
    DimensionFunction,
    FusionOperator,
    FusionRing,
    ValidationReport,
    check_dimension_function,
    fp_dimensions,
    gamma_matrix,
    multiply,
    validate_ring,
)
from .walk import (
    Kernel,
    Measure,
    apply_P,
    cesaro_mean,
    convolve,
    harmonic_space,
    is_generating,
    is_symmetric,
    kernel,
    sample_path,
    sample_paths,
    stationary_check,
    zero_two_diagnostic,
)

__version__ = "0.1.0"
BACKEND = _backend.NAME
