#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
NumericSystem - a random numeric realization of a SystemPattern.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Mapping, Optional

import numpy as np

from ..const import DEFAULT_NOISE, RHO_TOLERANCE
from ..errors import PatternValidationError, SystemFileError
from ..structure.pattern import SystemPattern
from ..structure.scc import scc_partition

logger = logging.getLogger(__name__)


def spectral_radius(M: np.ndarray) -> float:
    """Largest eigenvalue modulus, by a dense eigenvalue solve."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def power_spectral_radius(
    M: np.ndarray, iterations: int = 4000, burn_in: int = 1000, seed: int = 0
) -> float:
    """
    Spectral radius from the growth rate of ``M^k x``.

    Plain power iteration: the per-step log growth is averaged after a burn-in,
    which also copes with complex-conjugate dominant pairs where the Rayleigh
    quotient oscillates.
    """
    M = np.asarray(M, dtype=float)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=M.shape[0])
    x /= np.linalg.norm(x)
    log_growth = 0.0
    counted = 0
    for k in range(iterations):
        y = M @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        if k >= burn_in:
            log_growth += np.log(norm)
            counted += 1
        x = y / norm
    return float(np.exp(log_growth / max(counted, 1)))


def indicator_rows(states: Iterable[int], n: int) -> np.ndarray:
    ordered = sorted(states)
    H = np.zeros((len(ordered), n))
    for row, state in enumerate(ordered):
        H[row, state - 1] = 1.0
    return H


@dataclass
class NumericSystem:
    """A, per-sensor indicator rows H_j, and scalar noise covariances."""

    pattern: SystemPattern
    A: np.ndarray
    H: Dict[str, np.ndarray]
    sigma_v: float = DEFAULT_NOISE
    sigma_r: float = DEFAULT_NOISE
    seed: Optional[int] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.pattern.n

    @property
    def Q_v(self) -> np.ndarray:
        return self.sigma_v**2 * np.eye(self.n)

    def R_r(self, sensor_id: str) -> np.ndarray:
        return self.sigma_r**2 * np.eye(self.H[sensor_id].shape[0])

    @property
    def rho(self) -> float:
        return spectral_radius(self.A)

    def with_pattern(self, pattern: SystemPattern) -> "NumericSystem":
        """Same A and noise, measurement rows rebuilt for a new sensor set."""
        if pattern.n != self.n or pattern.edges != self.pattern.edges:
            raise PatternValidationError("sensor update must keep the system edges", offending=pattern.n)
        H = {sid: indicator_rows(pattern.measurement_entries[sid], self.n) for sid in pattern.sensor_ids()}
        return NumericSystem(pattern, self.A, H, self.sigma_v, self.sigma_r, self.seed, dict(self.meta))

    def check_pattern(self) -> None:
        support = {(j + 1, i + 1) for i, j in zip(*np.nonzero(self.A))}
        if support != set(self.pattern.edges):
            raise PatternValidationError("zero pattern of A does not match the system edges")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "system": self.pattern.to_dict(),
            "A": {"rows": self.n, "cols": self.n, "data": self.A.ravel().tolist()},
            "sigma_v": self.sigma_v,
            "sigma_r": self.sigma_r,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NumericSystem":
        try:
            pattern = SystemPattern.from_dict(data["system"])
            block = data["A"]
            A = np.asarray(block["data"], dtype=float).reshape(block["rows"], block["cols"])
        except (KeyError, TypeError, ValueError) as e:
            raise SystemFileError(f"malformed numeric system: {e}")
        system = cls(
            pattern=pattern,
            A=A,
            H={},
            sigma_v=float(data.get("sigma_v", DEFAULT_NOISE)),
            sigma_r=float(data.get("sigma_r", DEFAULT_NOISE)),
            seed=data.get("seed"),
        )
        system.check_pattern()
        return system.with_pattern(pattern)


def _rescale_block(A: np.ndarray, members, radius: float) -> None:
    idx = np.array(sorted(members)) - 1
    block = A[np.ix_(idx, idx)]
    current = spectral_radius(block)
    if current <= 0.0:
        raise PatternValidationError(
            f"SCC {sorted(members)} has no cycle; its spectral radius cannot be set",
            offending=sorted(members),
        )
    A[np.ix_(idx, idx)] = block * (radius / current)


def instantiate(
    pattern: SystemPattern,
    target_rho: float,
    seed: int,
    noise: float = DEFAULT_NOISE,
    measurement_noise: Optional[float] = None,
    scc_radii: Optional[Mapping[int, float]] = None,
) -> NumericSystem:
    """
    Draw nonzero entries uniformly from [-1, -0.1] U [0.1, 1] and rescale so rho(A) = target_rho.

    ``scc_radii`` maps SCC ids to the radius of that SCC's diagonal block. The
    eigenvalues of A are the union of those blocks' eigenvalues, so the map
    fixes which modes are unstable; the final rescale keeps rho(A) = target_rho.
    """
    if target_rho <= 0:
        raise ValueError(f"target_rho must be positive, got {target_rho}")

    rng = np.random.default_rng(seed)
    edges = pattern.sorted_edges()
    A = np.zeros((pattern.n, pattern.n))
    if edges:
        magnitudes = rng.uniform(0.1, 1.0, size=len(edges))
        signs = rng.choice([-1.0, 1.0], size=len(edges))
        for (j, i), value in zip(edges, magnitudes * signs):
            A[i - 1, j - 1] = value

    rho = spectral_radius(A)
    if rho <= 1e-12:
        raise PatternValidationError(
            "pattern has no cycle, so rho(A) = 0 and cannot be rescaled", offending=pattern.n
        )
    A *= target_rho / rho

    if scc_radii:
        partition = scc_partition(pattern)
        for cid, radius in sorted(scc_radii.items()):
            _rescale_block(A, partition.component(int(cid)), float(radius))
        rho = spectral_radius(A)
        A *= target_rho / rho

    achieved = spectral_radius(A)
    if abs(achieved - target_rho) > RHO_TOLERANCE:
        raise PatternValidationError(f"rescaled rho(A)={achieved} misses {target_rho}")

    H = {sid: indicator_rows(pattern.measurement_entries[sid], pattern.n) for sid in pattern.sensor_ids()}
    logger.debug(f"instantiated n={pattern.n} |E|={len(edges)} rho={achieved:.6f} seed={seed}")
    return NumericSystem(
        pattern=pattern,
        A=A,
        H=H,
        sigma_v=noise,
        sigma_r=noise if measurement_noise is None else measurement_noise,
        seed=seed,
    )
