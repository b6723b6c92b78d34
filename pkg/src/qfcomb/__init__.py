"""Biphoton quantum frequency combs: state synthesis, entanglement measures,
electro-optic quantum walks and simulated state tomography."""

from .comb import (
    BiphotonAmplitude,
    ModeConvention,
    PhaseMask,
    WeightSpec,
    apply_phase_mask,
    diagonal_component,
    gaussian_weights,
    jsi,
    maximally_entangled,
    qudit_target_state,
    subspace_postselect,
    synthesize,
)
from .entanglement import (
    DensityMatrix,
    EntropyReport,
    concurrence_and_eof,
    density_from_pure,
    depolarize,
    entropy_report,
    fidelity,
    log_negativity,
    partial_trace,
    purity,
)
from .walk import (
    EOMConfig,
    EnergyScale,
    SweepResult,
    chi_expectation,
    desync_average,
    energy_transfer_rate,
    eom_unitary,
    evolve,
    mean_total_energy,
    sweep_and_slope,
)

__version__ = "0.1.0"
