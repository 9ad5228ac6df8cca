"""Exact analysis toolkit for qudit magic state distillation.

Finite-field CSS code construction, the diagonal gate family that is
transversal on those codes, exact iteration of the distillation map,
thresholds and yields, dense state-vector cross-checks, and the
state-injection gadget, all behind one command line tool.
"""

from .codes import (
    CutoffExceeded,
    LinearCode,
    NonIntegerResult,
    WeightEnumerator,
    closed_form_rm_enumerators,
    macwilliams_transform,
    rm_code,
    weight_enumerator_bruteforce,
)
from .distill import (
    CoarseBounds,
    IterationResult,
    NoiseVector,
    RegionResult,
    YieldResult,
    coarse_bounds,
    distillable_region_qutrit,
    epsilon_series,
    gamma_star,
    iterate_depolarizing,
    iterate_depolarizing_exact,
    iterate_general,
    iteration_valid,
    success_probability_floor,
    taylor_coefficient,
    threshold_depolarizing,
    threshold_worst_case,
    quadratic_bound_constant,
    worst_epsilon_out,
    yield_for_target,
)
from .gates import (
    EmptySetError,
    MagicGate,
    MembershipReport,
    canonical_gate,
    gate_exists,
    lemma_check,
    verify_membership,
)
from .injection import (
    DensityMatrix,
    DimensionMismatch,
    PhaseState,
    inject,
    injection_deviation,
    measurement_unbiasedness_check,
    phase_state_of,
    resource_infidelity,
    trace_norm,
    twirl_resource,
)
from .oracle import (
    ProjectionOutcome,
    RoundSimulation,
    SizeExceeded,
    StateVector,
    apply_pauli,
    apply_transversal_diagonal,
    clifford_correction_vector,
    logical_amplitudes,
    plus_basis_state,
    project_stabilizer,
    simulate_round,
    transversality_defect,
    trichotomy_check,
    twirl_numeric,
)
from .qrm import CssReport, QrmCode, build_qrm, code_distance, validate_css, verify_transversality

__version__ = "0.1.0"

__all__ = [
    "CoarseBounds",
    "CssReport",
    "CutoffExceeded",
    "DensityMatrix",
    "DimensionMismatch",
    "EmptySetError",
    "IterationResult",
    "LinearCode",
    "MagicGate",
    "MembershipReport",
    "NoiseVector",
    "NonIntegerResult",
    "PhaseState",
    "ProjectionOutcome",
    "QrmCode",
    "RegionResult",
    "RoundSimulation",
    "SizeExceeded",
    "StateVector",
    "WeightEnumerator",
    "YieldResult",
    "apply_pauli",
    "apply_transversal_diagonal",
    "build_qrm",
    "canonical_gate",
    "clifford_correction_vector",
    "closed_form_rm_enumerators",
    "coarse_bounds",
    "code_distance",
    "distillable_region_qutrit",
    "epsilon_series",
    "gamma_star",
    "gate_exists",
    "inject",
    "injection_deviation",
    "iterate_depolarizing",
    "iterate_depolarizing_exact",
    "iterate_general",
    "iteration_valid",
    "lemma_check",
    "logical_amplitudes",
    "macwilliams_transform",
    "measurement_unbiasedness_check",
    "phase_state_of",
    "plus_basis_state",
    "project_stabilizer",
    "quadratic_bound_constant",
    "resource_infidelity",
    "rm_code",
    "simulate_round",
    "success_probability_floor",
    "taylor_coefficient",
    "threshold_depolarizing",
    "threshold_worst_case",
    "trace_norm",
    "transversality_defect",
    "trichotomy_check",
    "twirl_numeric",
    "twirl_resource",
    "validate_css",
    "verify_membership",
    "verify_transversality",
    "weight_enumerator_bruteforce",
    "worst_epsilon_out",
    "yield_for_target",
]
