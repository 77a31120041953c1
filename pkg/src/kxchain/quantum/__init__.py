"""Density matrices, operational partitions, typical projections, and the
semi-density ensembles built from enumeration caches, plus the chain-level
rate experiments on top of them."""

from .ensemble import (
    Component,
    LowerBoundReport,
    SemiDensityEnsemble,
    build_mu_hat,
    diagonal_semimeasure,
    ek_projection,
    gacs_lower,
    gacs_pair,
    gacs_upper,
    lower_bound_check,
    product_component,
    reduced_matrix,
)
from .experiments import (
    BrudnoLevel,
    CompositeReport,
    CompositeSample,
    MinimalProjectionSample,
    QuantumBrudnoReport,
    composite_experiment,
    quantum_brudno_experiment,
)
from .linalg import (
    DensityCheckError,
    charpoly_coefficients,
    charpoly_coefficients_exact,
    check_density,
    elementary_from_spec,
    haar_vector,
    hermitian_eig,
    is_positive_charpoly,
    matrix_from_spec,
    partial_trace,
    random_density,
    random_pure,
    relative_entropy,
    tensor,
    vn_entropy,
)
from .opu import (
    OPU,
    AFEntropyReport,
    PurificationReport,
    af_entropy_estimate,
    af_purification_check,
    identity_opu,
    matrix_unit_opu,
    opu_refine,
    opu_state,
    opu_validate,
)
from .typical import TypicalProjectionReport, typical_projection

__all__ = [
    "AFEntropyReport",
    "BrudnoLevel",
    "Component",
    "CompositeReport",
    "CompositeSample",
    "DensityCheckError",
    "LowerBoundReport",
    "MinimalProjectionSample",
    "OPU",
    "PurificationReport",
    "QuantumBrudnoReport",
    "SemiDensityEnsemble",
    "TypicalProjectionReport",
    "af_entropy_estimate",
    "af_purification_check",
    "build_mu_hat",
    "charpoly_coefficients",
    "charpoly_coefficients_exact",
    "check_density",
    "composite_experiment",
    "diagonal_semimeasure",
    "ek_projection",
    "elementary_from_spec",
    "gacs_lower",
    "gacs_pair",
    "gacs_upper",
    "haar_vector",
    "hermitian_eig",
    "identity_opu",
    "is_positive_charpoly",
    "lower_bound_check",
    "matrix_from_spec",
    "matrix_unit_opu",
    "opu_refine",
    "opu_state",
    "opu_validate",
    "partial_trace",
    "product_component",
    "quantum_brudno_experiment",
    "random_density",
    "random_pure",
    "reduced_matrix",
    "relative_entropy",
    "tensor",
    "typical_projection",
    "vn_entropy",
]
