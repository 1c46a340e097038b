"""Pseudo-Hermitian cavity dynamics with time-dependent antilinear symmetries.

Truncated-Fock-space toolkit for a cavity mode with modulated frequency and
unbalanced parametric gain: metric/Dyson constructions, closed-form spectra
and squeeze similarities, symmetry residuals and regime classification,
Schrodinger integration with phase extraction, and photon/quadrature
observables, plus a small CLI for sweeps and verification runs.
"""

from ._version import __version__
from .errors import (
    ConfigError,
    ExceptionalPointError,
    IntegrationOverflowError,
    InvalidDimensionError,
    InvariantBasisError,
    MetricViolationError,
    NumericError,
    ProjectionDeficitError,
)
from .fock_algebra import (
    AntilinearOperator,
    FockOperator,
    FockState,
    apply_antilinear,
    basis_state,
    hermitian_sqrt,
    identity_op,
    ladder_ops,
    matrix_exp,
    number_op,
    parity_op,
    vacuum_state,
)
from .metric_dyson import (
    HBAR,
    DysonMap,
    Metric,
    hermitian_counterpart,
    pseudo_expectation,
    pseudo_hermiticity_residual,
    pseudo_inner,
    pseudo_norm,
    pseudo_unitarity_residual,
    schrodinger_op_pseudo_hermiticity_residual,
)
from .casimir_model import (
    CasimirParams,
    Regime,
    SpectralResult,
    effective_hamiltonian,
    hamiltonian,
    interaction_hamiltonian,
    metric,
    reduced_params,
    rwa_hamiltonian,
    spectral_solve,
    squeeze_operator,
    squeeze_params,
    with_param,
    xi_phase,
)
from .symmetry_engine import (
    LRInvariant,
    SymmetryVerdict,
    antilinear_metric_residual,
    antilinear_symmetry_residual,
    build_C_operator,
    casimir_invariant,
    classify_regime,
    cpt_symmetry,
    ep_coalescence_overlap,
    find_exceptional_point,
    linear_invariant_residual,
    mode_pairing_residual,
    pt_symmetry,
    schrodinger_symmetry_residual,
    symmetry_eigenphase,
)
from .dynamics import (
    PhaseExtraction,
    Trajectory,
    assemble_solution,
    expansion_coefficients,
    integrate,
    lr_phase_extract,
    mode_phase_projection,
    phase_parity_check,
)
from .observables import (
    PhotonRecord,
    QuadratureRecord,
    oscillation_amplitude,
    photon_closed_form,
    photon_constant_drift,
    photon_ode_solve,
    photon_second_order_residual,
    photon_series,
    quadrature_from_moments,
    quadrature_stats,
)

__all__ = [
    "__version__",
    "ConfigError",
    "ExceptionalPointError",
    "IntegrationOverflowError",
    "InvalidDimensionError",
    "InvariantBasisError",
    "MetricViolationError",
    "NumericError",
    "ProjectionDeficitError",
    "AntilinearOperator",
    "FockOperator",
    "FockState",
    "apply_antilinear",
    "basis_state",
    "hermitian_sqrt",
    "identity_op",
    "ladder_ops",
    "matrix_exp",
    "number_op",
    "parity_op",
    "vacuum_state",
    "HBAR",
    "DysonMap",
    "Metric",
    "hermitian_counterpart",
    "pseudo_expectation",
    "pseudo_hermiticity_residual",
    "pseudo_inner",
    "pseudo_norm",
    "pseudo_unitarity_residual",
    "schrodinger_op_pseudo_hermiticity_residual",
    "CasimirParams",
    "Regime",
    "SpectralResult",
    "effective_hamiltonian",
    "hamiltonian",
    "interaction_hamiltonian",
    "metric",
    "reduced_params",
    "rwa_hamiltonian",
    "spectral_solve",
    "squeeze_operator",
    "squeeze_params",
    "with_param",
    "xi_phase",
    "LRInvariant",
    "SymmetryVerdict",
    "antilinear_metric_residual",
    "antilinear_symmetry_residual",
    "build_C_operator",
    "casimir_invariant",
    "classify_regime",
    "cpt_symmetry",
    "ep_coalescence_overlap",
    "find_exceptional_point",
    "linear_invariant_residual",
    "mode_pairing_residual",
    "pt_symmetry",
    "schrodinger_symmetry_residual",
    "symmetry_eigenphase",
    "PhaseExtraction",
    "Trajectory",
    "assemble_solution",
    "expansion_coefficients",
    "integrate",
    "lr_phase_extract",
    "mode_phase_projection",
    "phase_parity_check",
    "PhotonRecord",
    "QuadratureRecord",
    "oscillation_amplitude",
    "photon_closed_form",
    "photon_constant_drift",
    "photon_ode_solve",
    "photon_second_order_residual",
    "photon_series",
    "quadrature_from_moments",
    "quadrature_stats",
]
