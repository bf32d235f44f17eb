"""Structural analysis at a few thousand states (slow)."""

from __future__ import annotations

import time

import numpy as np
import pytest

from struct_recovery.sim.scenario import generate_random_scenario
from struct_recovery.structure.analysis import analyze
from struct_recovery.structure.contraction import contraction_sets
from struct_recovery.structure.pattern import SystemPattern
from struct_recovery.structure.scc import scc_partition
from struct_recovery.type_defs import Orientation


@pytest.mark.slow
@pytest.mark.parametrize("orientation", list(Orientation))
def test_sparse_random_system_with_two_thousand_states(orientation):
    n = 2000
    scenario = generate_random_scenario(n, 2.0 / n, seed=31, orientation=orientation)
    report = analyze(scenario.pattern, orientation)

    assert report.verdict.observable
    assert report.placement.m == len(scenario.pattern.measurement_entries)
    assert report.unreachable == []
    covered = set()
    for cset in report.contractions:
        assert not covered & cset.states
        covered |= cset.states
    assert set(report.matching.unmatched_left) <= covered


def _out_degree_pattern(n: int, degree: int, seed: int) -> SystemPattern:
    rng = np.random.default_rng(seed)
    edges = [
        (j, int(i) + 1) for j in range(1, n + 1) for i in rng.choice(n, size=degree, replace=False)
    ]
    return SystemPattern(n, edges)


@pytest.mark.slow
@pytest.mark.parametrize("orientation", list(Orientation))
def test_out_degree_three_system_is_analyzed_in_time(orientation):
    pattern = _out_degree_pattern(2000, 3, seed=5)

    started = time.perf_counter()
    contractions = contraction_sets(pattern, orientation)
    contraction_seconds = time.perf_counter() - started

    started = time.perf_counter()
    partition = scc_partition(pattern)
    scc_seconds = time.perf_counter() - started

    assert contraction_seconds < 30.0
    assert scc_seconds < 5.0
    covered = set()
    for cset in contractions:
        assert not covered & cset.states
        covered |= cset.states
    assert sum(len(component) for component in partition.components) == 2000
