"""Fock-space model of the fiber-optic two-qubit to qutrit encoder."""

from .encoder import (
    QUTRIT_FIBERS,
    BalancedCouplerError,
    damping_factors,
    encoder_output,
    encoding_success_probability,
    optimal_splitting_ratio,
    qutrit_density,
    simulate_encoding,
)
from .experiment import ExperimentConfig, Sweep, run_experiment
from .fock import (
    CouplerSpec,
    FockState,
    ModeOccupation,
    apply_attenuator,
    apply_coupler,
    apply_phase,
)
from .hom import hom_dip_scan, overlap_for_visibility, visibility, visibility_relative
from .params import IDEAL, CoincidenceRecord, ImperfectionParams
from .verification import mz_verify, phase_drift_process

__all__ = [
    "QUTRIT_FIBERS",
    "BalancedCouplerError",
    "CoincidenceRecord",
    "CouplerSpec",
    "ExperimentConfig",
    "FockState",
    "IDEAL",
    "ImperfectionParams",
    "ModeOccupation",
    "Sweep",
    "apply_attenuator",
    "apply_coupler",
    "apply_phase",
    "damping_factors",
    "encoder_output",
    "encoding_success_probability",
    "hom_dip_scan",
    "mz_verify",
    "optimal_splitting_ratio",
    "overlap_for_visibility",
    "phase_drift_process",
    "qutrit_density",
    "run_experiment",
    "simulate_encoding",
    "visibility",
    "visibility_relative",
]
