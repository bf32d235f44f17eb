"""Tests for block-diagonal gain synthesis."""

from __future__ import annotations

import numpy as np
import pytest

from struct_recovery.errors import GainPreconditionError, GainSynthesisError, SystemFileError
from struct_recovery.estimator.gain import (
    GainMatrix,
    design_gain,
    error_dynamics,
    verify_certificate,
)
from struct_recovery.estimator.network import build_network
from struct_recovery.estimator.numeric import instantiate
from struct_recovery.structure.analysis import classify_sensors
from struct_recovery.structure.pattern import SystemPattern


@pytest.fixture
def two_cycle():
    pattern = SystemPattern(2, [(1, 2), (2, 1)], {"s1": [1]})
    system = instantiate(pattern, target_rho=1.1, seed=0)
    network = build_network(classify_sensors(pattern), seed=0)
    return system, network


def test_certified_gain_for_a_measured_cycle(two_cycle):
    system, network = two_cycle
    gain = design_gain(system, network)

    dynamics = error_dynamics(system, network, gain)
    assert dynamics.stable
    assert dynamics.spectral_radius < 0.98
    by_eig, by_power = verify_certificate(dynamics, 0.98)
    assert by_eig < 0.98
    assert by_power < 0.98


def test_only_measured_columns_are_nonzero(two_cycle):
    system, network = two_cycle
    block = design_gain(system, network).block("s1")
    np.testing.assert_array_equal(block[:, 1], 0.0)


def test_unobservable_pair_is_a_precondition_error(dilation_pattern):
    reduced = dilation_pattern.without_sensor("b")
    system = instantiate(reduced, 1.1, seed=5, scc_radii={3: 1.1})
    network = build_network(classify_sensors(reduced), seed=0)

    with pytest.raises(GainPreconditionError):
        design_gain(system, network)


def test_unstable_hidden_mode_reports_the_best_gain(dilation_pattern):
    reduced = dilation_pattern.without_sensor("b")
    system = instantiate(reduced, 1.1, seed=5, scc_radii={3: 1.1})
    network = build_network(classify_sensors(reduced), seed=0)

    with pytest.raises(GainSynthesisError) as excinfo:
        design_gain(system, network, budget=200, check_observability=False)

    error = excinfo.value
    # the unmeasured parent block keeps its radius whatever the gain
    assert error.best_rho >= 1.1 - 1e-6
    assert error.evaluations <= 200
    assert isinstance(error.best_gain, GainMatrix)


def test_verify_certificate_rejects_a_false_bound(two_cycle):
    system, network = two_cycle
    dynamics = error_dynamics(system, network, GainMatrix.zeros(network.sensor_ids, system.n))
    with pytest.raises(GainSynthesisError):
        verify_certificate(dynamics, 0.98)


class TestGainMatrix:
    def test_restricted_keeps_known_blocks(self):
        gain = GainMatrix(["a", "b"], {"a": np.eye(2), "b": 2 * np.eye(2)})
        restricted = gain.restricted(["b", "c"], 2)

        assert restricted.sensor_ids == ["b", "c"]
        np.testing.assert_array_equal(restricted.block("b"), 2 * np.eye(2))
        np.testing.assert_array_equal(restricted.block("c"), np.zeros((2, 2)))

    def test_assembled_is_block_diagonal(self):
        gain = GainMatrix(["a", "b"], {"a": np.ones((2, 2)), "b": 2 * np.ones((2, 2))})
        K = gain.assembled()

        assert K.shape == (4, 4)
        np.testing.assert_array_equal(K[:2, 2:], 0.0)
        np.testing.assert_array_equal(K[2:, 2:], 2.0)

    def test_from_dict_reads_serialized_blocks(self):
        gain = GainMatrix.from_dict({"sensors": [{"id": 1, "rows": 1, "cols": 1, "data": [0.5]}]})
        assert gain.sensor_ids == ["1"]
        assert gain.block("1")[0, 0] == 0.5

    def test_from_dict_rejects_malformed_input(self):
        with pytest.raises(SystemFileError):
            GainMatrix.from_dict({"sensors": [{"id": "a", "rows": 2, "cols": 2, "data": [1.0]}]})
