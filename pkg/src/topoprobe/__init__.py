"""Randomized-measurement probes of symmetry-protected topological order.

Desk-scale toolkit for spin-1/2 chains: exact diagonalization of the
bond-alternating XXZ model and its perturbations, exact topological
invariants from reduced density matrices, simulated randomized-measurement
campaigns with their statistical estimators, Trotterized adiabatic state
preparation, and sweep/error-scaling studies.
"""
from .spincore import (
    SpinState,
    LocalUnitary,
    basis_state,
    all_up_state,
    neel_state,
    random_state,
    apply_local_unitary,
    hamming_distance,
    reflect_index,
    marginal_probabilities,
    sample_bitstrings,
)
from .partitions import PartitionSpec, reflection_partition, three_segment_partition
from .hamiltonians import HamiltonianSpec, matvec, dense_matrix, compile_hamiltonian
from .groundstate import EigenResult, ConvergenceError, ground_state
from .rdm import (
    InvariantValue,
    ReducedDensityMatrix,
    d2_invariant,
    exact_invariant,
    klein_bottle_invariant,
    purity,
    reduced_density_matrix,
    reflection_invariant,
    time_reversal_invariant,
)
from .protocols import (
    EstimatorResult,
    MeasurementRecord,
    ProtocolParams,
    UnitaryPattern,
    build_pattern,
    estimate_normalized,
    estimate_purity,
    estimate_raw,
    run_campaign,
    sample_cue,
    twirl_check,
)
from .dynamics import RampSpec, adiabatic_evolve, evolve, monitor_invariants
from .analysis import (
    CorrelationLengthFit,
    SweepSpec,
    error_scaling_scan,
    fit_correlation_length,
    run_sweep,
    symmetry_breaking_report,
)

__all__ = [
    "SpinState",
    "LocalUnitary",
    "basis_state",
    "all_up_state",
    "neel_state",
    "random_state",
    "apply_local_unitary",
    "hamming_distance",
    "reflect_index",
    "marginal_probabilities",
    "sample_bitstrings",
    "PartitionSpec",
    "reflection_partition",
    "three_segment_partition",
    "HamiltonianSpec",
    "matvec",
    "dense_matrix",
    "compile_hamiltonian",
    "EigenResult",
    "ConvergenceError",
    "ground_state",
    "InvariantValue",
    "ReducedDensityMatrix",
    "reduced_density_matrix",
    "purity",
    "reflection_invariant",
    "time_reversal_invariant",
    "d2_invariant",
    "klein_bottle_invariant",
    "exact_invariant",
    "ProtocolParams",
    "UnitaryPattern",
    "MeasurementRecord",
    "EstimatorResult",
    "sample_cue",
    "build_pattern",
    "run_campaign",
    "estimate_raw",
    "estimate_purity",
    "estimate_normalized",
    "twirl_check",
    "RampSpec",
    "evolve",
    "adiabatic_evolve",
    "monitor_invariants",
    "SweepSpec",
    "run_sweep",
    "CorrelationLengthFit",
    "fit_correlation_length",
    "error_scaling_scan",
    "symmetry_breaking_report",
]

__version__ = "0.1.0"
