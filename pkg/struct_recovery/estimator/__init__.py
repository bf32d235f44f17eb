"""Numeric layer: instantiation, estimator network, gain synthesis and the filter step."""

from .filter import StepOperators, estimator_step, fused_step, noise_free_measurements
from .gain import (
    ErrorDynamics,
    GainMatrix,
    closed_loop_matrix,
    design_gain,
    error_dynamics,
    verify_certificate,
)
from .network import EstimatorNetwork, build_DH, build_network, stacked_dynamics
from .numeric import NumericSystem, instantiate, power_spectral_radius, spectral_radius
from .observability import distributed_observability, observable_dimension, pbh_unobservable_modes

__all__ = [
    "ErrorDynamics",
    "EstimatorNetwork",
    "GainMatrix",
    "NumericSystem",
    "StepOperators",
    "build_DH",
    "build_network",
    "closed_loop_matrix",
    "design_gain",
    "distributed_observability",
    "error_dynamics",
    "estimator_step",
    "fused_step",
    "instantiate",
    "noise_free_measurements",
    "observable_dimension",
    "pbh_unobservable_modes",
    "power_spectral_radius",
    "spectral_radius",
    "stacked_dynamics",
    "verify_certificate",
]
