#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Estimator network: prediction-fusion weights W over G_beta and the alpha hub.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Union

import networkx as nx
import numpy as np
from scipy import linalg

from ..const import ROW_SUM_TOLERANCE
from ..errors import PatternValidationError
from ..structure.analysis import SensorClassification
from ..type_defs import SensorType
from .numeric import NumericSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimatorNetwork:
    sensor_ids: List[str]
    W: np.ndarray
    alpha_neighborhoods: Dict[str, FrozenSet[str]]
    alpha_ids: FrozenSet[str]

    @property
    def m(self) -> int:
        return len(self.sensor_ids)

    def index(self, sensor_id: str) -> int:
        return self.sensor_ids.index(sensor_id)

    def validate(self) -> None:
        m = self.m
        if self.W.shape != (m, m):
            raise PatternValidationError(f"W has shape {self.W.shape}, expected ({m}, {m})")
        if np.any(self.W < 0):
            raise PatternValidationError("W has negative weights")
        row_sums = self.W.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > ROW_SUM_TOLERANCE:
            raise PatternValidationError(f"W is not row-stochastic: row sums {row_sums}")
        support = nx.DiGraph()
        support.add_nodes_from(range(m))
        support.add_edges_from(zip(*np.nonzero(self.W)))
        if not nx.is_strongly_connected(support):
            raise PatternValidationError("support of W (G_beta) is not strongly connected")
        for sid, hood in self.alpha_neighborhoods.items():
            if sid not in hood or not self.alpha_ids <= hood:
                raise PatternValidationError(f"alpha neighbourhood of {sid} misses the hub")

    def neighborhood_matrix(self) -> np.ndarray:
        """m x m 0/1 matrix with N[i, j] = 1 iff j is in N_alpha(i)."""
        N = np.zeros((self.m, self.m))
        for i, sid in enumerate(self.sensor_ids):
            for other in self.alpha_neighborhoods[sid]:
                N[i, self.index(other)] = 1.0
        return N


def ring_support(m: int) -> np.ndarray:
    support = np.eye(m, dtype=bool)
    for i in range(m):
        support[i, (i + 1) % m] = True
    return support


def build_network(
    classification: SensorClassification,
    seed: Union[int, Sequence[int]],
    sensor_ids: Optional[Sequence[str]] = None,
    support: Optional[np.ndarray] = None,
) -> EstimatorNetwork:
    """
    Random row-stochastic W on a directed ring plus self-loops (or a given
    strongly connected ``support``), and N_alpha(i) = {i} U {alpha sensors}.
    """
    ids = list(sensor_ids) if sensor_ids is not None else classification.sensor_ids()
    if not ids:
        raise PatternValidationError("at least one sensor must be alive to build the network")
    m = len(ids)

    mask = ring_support(m) if support is None else np.asarray(support, dtype=bool)
    if mask.shape != (m, m):
        raise PatternValidationError(f"support has shape {mask.shape}, expected ({m}, {m})")
    mask = mask | np.eye(m, dtype=bool)

    rng = np.random.default_rng(seed)
    W = np.where(mask, rng.uniform(0.1, 1.0, size=(m, m)), 0.0)
    W = W / W.sum(axis=1, keepdims=True)

    alpha_ids = frozenset(sid for sid in ids if classification.type_of(sid) is SensorType.ALPHA)
    hoods = {sid: frozenset({sid}) | alpha_ids for sid in ids}
    network = EstimatorNetwork(sensor_ids=ids, W=W, alpha_neighborhoods=hoods, alpha_ids=alpha_ids)
    network.validate()
    logger.debug(f"network: m={m}, alpha hub={sorted(alpha_ids)}")
    return network


def local_information(system: NumericSystem, network: EstimatorNetwork, sensor_id: str) -> np.ndarray:
    """D_i = sum of H_j^T H_j over j in N_alpha(i)."""
    n = system.n
    D = np.zeros((n, n))
    for other in network.alpha_neighborhoods[sensor_id]:
        H = system.H.get(other)
        if H is not None:
            D += H.T @ H
    return D


def build_DH(system: NumericSystem, network: EstimatorNetwork) -> np.ndarray:
    return linalg.block_diag(*(local_information(system, network, sid) for sid in network.sensor_ids))


def stacked_dynamics(system: NumericSystem, network: EstimatorNetwork) -> np.ndarray:
    """W kron A."""
    return np.kron(network.W, system.A)
