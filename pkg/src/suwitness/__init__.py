"""Entanglement witnesses for two-mode bosonic states built from the su(2)
and su(1,1) algebras, evaluated on truncated Fock spaces."""

__version__ = "0.1.0"

from .algebra import OperatorSet, build_operator_set, commutator_residual
from .catalog import StateSpec, catalog_separable_suite, realize, two_photon_theta
from .criteria import (
    CovarianceRecord,
    CriterionReport,
    covariance_record,
    evaluate,
    hur_margin,
    srr_margin,
    sym_covariance,
    verify_pt_covariance,
    verify_pt_moments,
    witness_w9,
    witness_w12,
    witness_w14,
)
from .fock import (
    FockSpace,
    Operator,
    QuantumState,
    annihilation,
    build_space,
    creation,
    density_from_pure,
    expectation,
    partial_transpose,
    pure_state,
    tail_mass,
)
from .measurement import (
    OutcomeDistribution,
    ShotRecord,
    estimated_report,
    exact_moment_check,
    outcome_distribution,
    reconstruct,
    sample_shots,
    simulate_protocol,
)
from .transforms import (
    PhaseShift,
    beamsplitter_unitary,
    invariance_scan,
    nulling_phase,
    phase_shift,
    rotate_record,
)

__all__ = [
    "CovarianceRecord",
    "CriterionReport",
    "FockSpace",
    "Operator",
    "OperatorSet",
    "OutcomeDistribution",
    "PhaseShift",
    "QuantumState",
    "ShotRecord",
    "StateSpec",
    "annihilation",
    "beamsplitter_unitary",
    "build_operator_set",
    "build_space",
    "catalog_separable_suite",
    "commutator_residual",
    "covariance_record",
    "creation",
    "density_from_pure",
    "estimated_report",
    "evaluate",
    "exact_moment_check",
    "expectation",
    "hur_margin",
    "invariance_scan",
    "nulling_phase",
    "outcome_distribution",
    "partial_transpose",
    "phase_shift",
    "pure_state",
    "realize",
    "reconstruct",
    "rotate_record",
    "sample_shots",
    "simulate_protocol",
    "srr_margin",
    "sym_covariance",
    "tail_mass",
    "two_photon_theta",
    "verify_pt_covariance",
    "verify_pt_moments",
    "witness_w12",
    "witness_w14",
    "witness_w9",
]
