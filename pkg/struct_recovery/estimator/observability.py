#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Numeric observability tests.

``observable_dimension`` grows an orthonormal basis of the observable subspace
block by block (``C^T``, then ``A^T`` applied to the newest block, projected
against everything found so far). On the normalized pair this avoids forming
``C A^k`` explicitly, whose rows become nearly parallel for unstable ``A``.
"""

from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np

from ..const import MAX_DISTRIBUTED_DIM, PBH_CLUSTER_TOLERANCE, RANK_TOLERANCE_FLOOR
from ..errors import ObservabilityCrossCheckError, ObservabilityGuardError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


def rank_tolerance(dim: int) -> float:
    """Singular-value threshold on a unit-norm problem of size ``dim``."""
    return max(dim, RANK_TOLERANCE_FLOOR) * _EPS


def _normalized(A: np.ndarray, C: np.ndarray):
    A = np.asarray(A, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    a_scale = np.linalg.norm(A, 2) if A.size else 0.0
    c_scale = np.linalg.norm(C, 2) if C.size else 0.0
    return (
        A / a_scale if a_scale > 0 else A,
        C / c_scale if c_scale > 0 else C,
        a_scale if a_scale > 0 else 1.0,
    )


def _orth(M: np.ndarray, tol: float) -> np.ndarray:
    if M.size == 0:
        return M
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, s > tol]


def observable_dimension(A: np.ndarray, C: np.ndarray, tol: Optional[float] = None) -> int:
    """Rank of the observability matrix of (A, C)."""
    Ab, Cs, _ = _normalized(A, C)
    size = Ab.shape[0]
    if Cs.size == 0 or not np.any(Cs):
        return 0
    tol = rank_tolerance(size) if tol is None else tol

    basis = _orth(Cs.T, tol)
    block = basis
    while 0 < basis.shape[1] < size and block.shape[1] > 0:
        candidate = Ab.T @ block
        # project twice to keep the residual at roundoff level
        for _ in range(2):
            candidate = candidate - basis @ (basis.T @ candidate)
        block = _orth(candidate, tol)
        if block.shape[1]:
            basis = np.hstack([basis, block])
    return min(basis.shape[1], size)


def _cluster_eigenvalues(values: np.ndarray, rel_tol: float) -> List[complex]:
    ordered = sorted(values, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    clusters: List[List[complex]] = []
    for lam in ordered:
        for cluster in clusters:
            rep = cluster[0]
            if abs(lam - rep) <= rel_tol * max(1.0, abs(rep)):
                cluster.append(lam)
                break
        else:
            clusters.append([lam])
    return [complex(np.mean(c)) for c in clusters]


def pbh_unobservable_modes(
    A: np.ndarray, C: np.ndarray, tol: Optional[float] = None
) -> List[complex]:
    """Eigenvalues of A at which [A - lambda I; C] loses column rank."""
    Ab, Cs, a_scale = _normalized(A, C)
    size = Ab.shape[0]
    if Cs.size == 0:
        Cs = np.zeros((1, size))
    tol = max(rank_tolerance(size), np.sqrt(_EPS)) if tol is None else tol

    eye = np.eye(size)
    modes = []
    for lam in _cluster_eigenvalues(np.linalg.eigvals(Ab), PBH_CLUSTER_TOLERANCE):
        stacked = np.vstack([Ab - lam * eye, Cs.astype(complex)])
        sigma_min = np.linalg.svd(stacked, compute_uv=False)[-1]
        if sigma_min <= tol:
            modes.append(lam * a_scale)
    return modes


def distributed_observability(
    WA: np.ndarray, D_H: np.ndarray, limit: int = MAX_DISTRIBUTED_DIM
) -> bool:
    """Observability of (W kron A, D_H), decided by rank and cross-checked by PBH."""
    size = WA.shape[0]
    if size > limit:
        raise ObservabilityGuardError(size, limit)
    if D_H.shape != WA.shape:
        raise ValueError(f"D_H has shape {D_H.shape}, expected {WA.shape}")

    dim = observable_dimension(WA, D_H)
    rank_verdict = dim == size
    modes = pbh_unobservable_modes(WA, D_H)
    pbh_verdict = not modes
    if rank_verdict != pbh_verdict:
        raise ObservabilityCrossCheckError(
            rank_verdict,
            pbh_verdict,
            detail=f"observable dimension {dim}/{size}, PBH-deficient modes {modes[:4]}",
        )
    if not rank_verdict:
        logger.info(
            f"(W kron A, D_H) not observable: dimension {dim}/{size}, "
            f"unobservable modes near {[complex(round(m.real, 6), round(m.imag, 6)) for m in modes[:4]]}"
        )
    return rank_verdict
