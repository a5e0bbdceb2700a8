"""Gaussian-process channel estimation for continuously moving fluid antennas."""

from ._validation import DomainError, NumericError, StreamError
from .estimator import (
    EstimationProblem,
    FluidAntennaGPR,
    PilotConfig,
    lmmse_estimate,
    make_pilot_book,
    nmse,
    nmse_batch,
    simulate_pilot_phase,
    theoretical_mse,
)
from .experiments import (
    ExperimentSpec,
    ResultTable,
    check_dominance,
    empirical_check,
    evaluate_pair,
    run_cdf,
    run_sweep,
)
from .gaussfield import PositionSet, build_covariance, psd_factor, sample_field
from .kernel import JAKES, SpatialKernel, bessel_j0, gram
from .network import NetworkConfig, generate_network
from .trajectory import (
    MotionConstraint,
    PortSet,
    Trajectory,
    discrete_greedy,
    linear_sweep,
    oscillatory,
    random_admissible,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NumericError",
    "StreamError",
    "EstimationProblem",
    "FluidAntennaGPR",
    "PilotConfig",
    "lmmse_estimate",
    "make_pilot_book",
    "nmse",
    "nmse_batch",
    "simulate_pilot_phase",
    "theoretical_mse",
    "ExperimentSpec",
    "ResultTable",
    "check_dominance",
    "empirical_check",
    "evaluate_pair",
    "run_cdf",
    "run_sweep",
    "PositionSet",
    "build_covariance",
    "psd_factor",
    "sample_field",
    "JAKES",
    "SpatialKernel",
    "bessel_j0",
    "gram",
    "NetworkConfig",
    "generate_network",
    "MotionConstraint",
    "PortSet",
    "Trajectory",
    "discrete_greedy",
    "linear_sweep",
    "oscillatory",
    "random_admissible",
    "validate",
]
