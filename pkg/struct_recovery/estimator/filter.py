#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Single time-scale distributed estimator step.

Prediction fusion::

    pred_i = sum_j w_ij A xhat_j

Measurement fusion over the alpha neighbourhood::

    xhat_i = pred_i + K_i sum_{j in N_alpha(i)} H_j^T (y_j - H_j pred_i)

Arrays carry an optional leading trial axis: estimates are ``(m, n)`` or
``(trials, m, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from .gain import GainMatrix
from .network import EstimatorNetwork, local_information
from .numeric import NumericSystem


@dataclass
class StepOperators:
    """Dense operators for one (system, network, gain) phase."""

    A: np.ndarray
    W: np.ndarray
    D: np.ndarray  # (m, n, n) local information blocks
    K: np.ndarray  # (m, n, n) gain blocks
    fusion: np.ndarray  # (m, m) 0/1 alpha-neighbourhood matrix

    @classmethod
    def build(cls, system: NumericSystem, network: EstimatorNetwork, gain: GainMatrix) -> "StepOperators":
        if list(gain.sensor_ids) != list(network.sensor_ids):
            raise ValueError(f"gain sensors {gain.sensor_ids} do not match network {network.sensor_ids}")
        D = np.stack([local_information(system, network, sid) for sid in network.sensor_ids])
        K = np.stack([gain.blocks[sid] for sid in network.sensor_ids])
        return cls(A=system.A, W=network.W, D=D, K=K, fusion=network.neighborhood_matrix())


def stack_measurements(
    measurements: Mapping[str, np.ndarray], system: NumericSystem, network: EstimatorNetwork
) -> np.ndarray:
    """H_j^T y_j for every sensor of the network, shape ``(..., m, n)``."""
    projected = []
    for sid in network.sensor_ids:
        H = system.H[sid]
        y = np.asarray(measurements[sid], dtype=float)
        if y.shape[-1] != H.shape[0]:
            raise ValueError(f"measurement of {sid} has {y.shape[-1]} rows, expected {H.shape[0]}")
        projected.append(np.einsum("...r,rn->...n", y, H))
    return np.stack(projected, axis=-2)


def fused_step(ops: StepOperators, estimates: np.ndarray, projected: np.ndarray) -> np.ndarray:
    """Vectorized step on ``(..., m, n)`` estimates and ``H^T y`` terms."""
    pred = np.einsum("ij,...jk->...ik", ops.W, np.einsum("...jl,kl->...jk", estimates, ops.A))
    fused = np.einsum("ij,...jn->...in", ops.fusion, projected)
    innovation = fused - np.einsum("ink,...ik->...in", ops.D, pred)
    return pred + np.einsum("ink,...ik->...in", ops.K, innovation)


def estimator_step(
    estimates: np.ndarray,
    measurements: Mapping[str, np.ndarray],
    network: EstimatorNetwork,
    gain: GainMatrix,
    system: NumericSystem,
) -> np.ndarray:
    """One prediction-fusion plus measurement-fusion step for every alive sensor."""
    estimates = np.asarray(estimates, dtype=float)
    if estimates.shape[-2:] != (network.m, system.n):
        raise ValueError(
            f"estimates have shape {estimates.shape}, expected (..., {network.m}, {system.n})"
        )
    ops = StepOperators.build(system, network, gain)
    return fused_step(ops, estimates, stack_measurements(measurements, system, network))


def noise_free_measurements(system: NumericSystem, network: EstimatorNetwork, x: np.ndarray) -> Dict[str, np.ndarray]:
    return {sid: np.einsum("rn,...n->...r", system.H[sid], x) for sid in network.sensor_ids}
