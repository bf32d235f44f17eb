#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Desk-scale oracles used to cross-check the structural analysis.

Everything here is exponential or numeric and meant for n <= 8.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import FrozenSet, List, Optional, Set

import numpy as np

from ..errors import OracleDisagreementError
from .digraph import BipartiteGraph, Link
from .pattern import SystemPattern

logger = logging.getLogger(__name__)

ORACLE_DRAWS = 3
ORACLE_RANK_TOL = 1e-10


def random_instance(pattern: SystemPattern, rng: np.random.Generator):
    """A with entries uniform in [0.5, 1.5] and random signs; C with one indicator row per measurement."""
    A = np.zeros((pattern.n, pattern.n))
    edges = pattern.sorted_edges()
    if edges:
        values = rng.uniform(0.5, 1.5, size=len(edges)) * rng.choice([-1.0, 1.0], size=len(edges))
        for (j, i), value in zip(edges, values):
            A[i - 1, j - 1] = value
    pairs = pattern.measurement_pairs()
    C = np.zeros((len(pairs), pattern.n))
    for row, (_sensor, state) in enumerate(pairs):
        C[row, state - 1] = 1.0
    return A, C


def generic_rank_observable(
    pattern: SystemPattern, draws: int = ORACLE_DRAWS, seed: int = 0
) -> bool:
    """Observability-matrix rank test over independent random instantiations."""
    # local import: the estimator package imports structure
    from ..estimator.observability import observable_dimension

    rng = np.random.default_rng(seed)
    verdicts = []
    for _ in range(draws):
        A, C = random_instance(pattern, rng)
        verdicts.append(observable_dimension(A, C, tol=ORACLE_RANK_TOL) == pattern.n)
    if len(set(verdicts)) != 1:
        raise OracleDisagreementError(
            f"random instantiations disagree on rank (verdicts {verdicts}) for {pattern.to_dict()}"
        )
    return verdicts[0]


def brute_force_matching_size(graph: BipartiteGraph) -> int:
    """Exhaustive maximum matching size over (left index, used-right mask) states."""
    adj = graph.adjacency()
    n = graph.n

    @lru_cache(maxsize=None)
    def best(u: int, used: int) -> int:
        if u == n:
            return 0
        value = best(u + 1, used)
        for r in adj[u]:
            if not used & (1 << r):
                value = max(value, 1 + best(u + 1, used | (1 << r)))
        return value

    return best(0, 0)


def enumerate_maximum_matchings(graph: BipartiteGraph, size: Optional[int] = None) -> List[FrozenSet[Link]]:
    """Every matching of maximum cardinality."""
    adj = graph.adjacency()
    n = graph.n
    target = brute_force_matching_size(graph) if size is None else size
    found: List[FrozenSet[Link]] = []
    current: List[Link] = []

    def extend(u: int, used: Set[int]) -> None:
        if len(current) + (n - u) < target:
            return
        if u == n:
            if len(current) == target:
                found.append(frozenset(current))
            return
        for r in adj[u]:
            if r not in used:
                used.add(r)
                current.append((u + 1, r + 1))
                extend(u + 1, used)
                current.pop()
                used.discard(r)
        extend(u + 1, used)

    extend(0, set())
    return found


def unmatched_union(graph: BipartiteGraph) -> FrozenSet[int]:
    """States left unmatched by at least one maximum matching."""
    union: Set[int] = set()
    everyone = set(graph.left)
    for pairs in enumerate_maximum_matchings(graph):
        union |= everyone - {left for left, _ in pairs}
    return frozenset(union)
