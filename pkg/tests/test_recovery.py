"""Tests for recovery planning after sensor failures."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from struct_recovery.errors import (
    MisclassifiedSensorError,
    PlanInfeasibleError,
    RecoveryConsistencyError,
)
from struct_recovery.recovery.planner import (
    FailureEvent,
    RecoveryPlan,
    apply_plan,
    apply_plans,
    plan_alpha_recovery,
    plan_beta_recovery,
    plan_recovery,
    plan_sequence,
    recover,
    retire_sensor,
)
from struct_recovery.structure.analysis import (
    classify_sensors,
    minimal_sensor_placement,
    structural_observability,
)
from struct_recovery.structure.digraph import build_bipartite
from struct_recovery.structure.oracle import generic_rank_observable, unmatched_union
from struct_recovery.structure.pattern import SystemPattern
from struct_recovery.type_defs import Connectivity, SensorType


def test_alpha_plan_moves_to_the_other_contraction_member(dilation_pattern):
    plan = plan_alpha_recovery(dilation_pattern, FailureEvent("a"))

    assert plan.feasible
    assert plan.failed_type is SensorType.ALPHA
    assert plan.failed_state == 1
    assert plan.target_id == 1
    assert plan.candidates == (2,)
    assert plan.chosen_state == 2
    assert plan.connectivity is Connectivity.HUB
    assert plan.replacement_id == "a'"


def test_beta_plan_moves_within_the_parent_scc(dilation_pattern):
    plan = plan_beta_recovery(dilation_pattern, FailureEvent("b"))

    assert plan.feasible
    assert plan.failed_state == 4
    assert plan.target_id == 3
    assert plan.candidates == (5,)
    assert plan.chosen_state == 5
    assert plan.connectivity is Connectivity.STRONGLY_CONNECTED
    assert plan.replacement_id == "b'"


def test_self_cycle_parent_has_no_beta_replacement(self_loop_parent):
    plan = plan_beta_recovery(self_loop_parent, FailureEvent("b"))

    assert not plan.feasible
    assert plan.candidates == ()
    assert plan.chosen_state is None
    assert "self-cycle" in plan.diagnostic
    with pytest.raises(PlanInfeasibleError):
        apply_plan(self_loop_parent, plan)


def test_wrong_role_is_reported(dilation_pattern):
    with pytest.raises(MisclassifiedSensorError) as excinfo:
        plan_alpha_recovery(dilation_pattern, FailureEvent("b"))
    assert excinfo.value.actual == "beta"

    with pytest.raises(MisclassifiedSensorError):
        plan_beta_recovery(dilation_pattern, FailureEvent("a"))


def test_sensor_holding_both_roles_gets_two_plans(chain):
    plans = plan_recovery(chain, FailureEvent("s1"))

    assert [p.failed_type for p in plans] == [SensorType.ALPHA, SensorType.BETA]
    assert [p.replacement_id for p in plans] == ["s1'", "s1''"]
    # both sets are singletons on a chain
    assert not any(p.feasible for p in plans)


def test_redundant_sensor_needs_no_plan(dilation_pattern):
    extended = dilation_pattern.with_sensor("c", [5])
    assert plan_recovery(extended, FailureEvent("c")) == []


def test_replacement_ids_skip_ids_in_use(dilation_pattern):
    taken = dilation_pattern.with_sensor("a'", [5])
    assert plan_alpha_recovery(taken, FailureEvent("a")).replacement_id == "a''"


def test_apply_plan_keeps_the_pattern_observable(dilation_pattern):
    plan = plan_alpha_recovery(dilation_pattern, FailureEvent("a"))
    recovered = apply_plan(dilation_pattern, plan)

    assert recovered.sensor_ids() == ["a'", "b"]
    assert recovered.sensor_states("a'") == frozenset({2})
    assert structural_observability(recovered).observable


def test_apply_plans_without_plans_is_a_no_op(dilation_pattern):
    assert apply_plans(dilation_pattern, []) is dilation_pattern


def test_apply_rejects_a_plan_that_reuses_the_failed_state(dilation_pattern):
    plan = plan_alpha_recovery(dilation_pattern, FailureEvent("a"))
    stale = RecoveryPlan(**{**plan.__dict__, "chosen_state": 1, "equivalent_states": (1,)})

    with pytest.raises(PlanInfeasibleError):
        apply_plan(dilation_pattern, stale)


def test_apply_rechecks_observability(dilation_pattern):
    plan = plan_alpha_recovery(dilation_pattern, FailureEvent("a"))
    wrong = RecoveryPlan(**{**plan.__dict__, "chosen_state": 4, "equivalent_states": (4,)})

    with pytest.raises(RecoveryConsistencyError) as excinfo:
        apply_plan(dilation_pattern, wrong)
    assert excinfo.value.violations


def test_plan_sequence_applies_failures_in_step_order(dilation_pattern):
    final, history = plan_sequence(
        dilation_pattern, [FailureEvent("b", step=5), FailureEvent("a", step=2)]
    )

    assert [[p.failed_sensor_id for p in plans] for plans in history] == [["a"], ["b"]]
    assert final.sensor_ids() == ["a'", "b'"]
    assert structural_observability(final).observable


def test_plan_sequence_stops_at_an_infeasible_failure(self_loop_parent):
    with pytest.raises(PlanInfeasibleError) as excinfo:
        plan_sequence(self_loop_parent, [FailureEvent("b")])
    assert excinfo.value.plan.failed_sensor_id == "b"


def test_plan_to_dict(dilation_pattern):
    data = plan_alpha_recovery(dilation_pattern, FailureEvent("a")).to_dict()

    assert data["failed_type"] == "alpha"
    assert data["connectivity"] == "hub"
    assert data["feasible"] is True
    assert data["equivalent_states"] == [2]


def test_negative_failure_step_is_rejected():
    with pytest.raises(ValueError):
        FailureEvent("a", step=-1)


class TestMultiRoleSensor:
    """Sensor "a" measures both the contraction {1, 2} and the parent SCC {4, 5}."""

    @pytest.fixture
    def shared(self, dilation_pattern):
        return dilation_pattern.with_sensors({"a": [1, 4]})

    def test_alpha_plan_keeps_the_other_role(self, shared):
        plan = plan_alpha_recovery(shared, FailureEvent("a"))
        assert plan.role_states == (1,)

        recovered = apply_plan(shared, plan)
        assert recovered.sensor_states("a") == frozenset({4})
        assert recovered.sensor_states("a'") == frozenset({2})
        assert structural_observability(recovered).observable

    def test_second_role_is_verified_after_the_first(self, shared):
        alpha, beta = plan_recovery(shared, FailureEvent("a"))

        assert beta.role_states == (4,)
        assert beta.replacement_id == "a''"
        both = apply_plans(shared, [alpha, beta])
        assert "a" not in both.measurement_entries
        assert structural_observability(both).observable

    def test_recover_replaces_every_role_and_retires_the_sensor(self, shared):
        recovered, plans = recover(shared, FailureEvent("a"))

        assert [(p.failed_type, p.chosen_state) for p in plans] == [
            (SensorType.ALPHA, 2),
            (SensorType.BETA, 5),
        ]
        assert recovered.sensor_ids() == ["a'", "a''"]
        assert structural_observability(recovered).observable

    def test_retire_sensor_rejects_a_needed_sensor(self, dilation_pattern):
        with pytest.raises(RecoveryConsistencyError):
            retire_sensor(dilation_pattern, "b")
        assert retire_sensor(dilation_pattern, "zz") is dilation_pattern


def _placed_pattern(rng: np.random.Generator, max_n: int) -> SystemPattern:
    """A random observable pattern whose placed measurements are merged into multi-state sensors."""
    n = int(rng.integers(1, max_n + 1))
    density = float(rng.choice([0.2, 0.35, 0.5]))
    mask = rng.random((n, n)) < density
    edges = [(int(j) + 1, int(i) + 1) for j, i in zip(*np.nonzero(mask))]
    bare = SystemPattern(n, edges)
    states = [req.state for req in minimal_sensor_placement(bare).requirements]
    if rng.random() < 0.5:
        states.append(int(rng.integers(1, n + 1)))
    groups = int(rng.integers(1, len(states) + 1))
    sensors: dict = {}
    for state in states:
        sensors.setdefault(f"s{int(rng.integers(1, groups + 1))}", set()).add(state)
    return bare.with_sensors(sensors)


def _check_recovery(pattern: SystemPattern, seed: int) -> int:
    """Every feasible plan must apply cleanly; returns the number of plans checked."""
    assert structural_observability(pattern).observable
    unmatched = unmatched_union(build_bipartite(pattern))
    classification = classify_sensors(pattern)
    checked = 0
    for sid in pattern.sensor_ids():
        sensor_type = classification.type_of(sid)
        single = None
        if sensor_type is SensorType.ALPHA:
            single = plan_alpha_recovery(pattern, FailureEvent(sid))
            # any contraction member is unmatched under some maximum matching
            assert set(single.candidates) <= unmatched, pattern.to_dict()
        elif sensor_type is SensorType.BETA:
            single = plan_beta_recovery(pattern, FailureEvent(sid))
        if single is not None:
            for state in single.equivalent_states:
                substituted = apply_plan(pattern, replace(single, chosen_state=state))
                assert generic_rank_observable(substituted, seed=seed), pattern.to_dict()
                checked += 1

        plans = plan_recovery(pattern, FailureEvent(sid))
        if all(plan.feasible for plan in plans):
            recovered, _ = recover(pattern, FailureEvent(sid))
            assert sid not in recovered.measurement_entries
            assert structural_observability(recovered).observable
            assert generic_rank_observable(recovered, seed=seed), pattern.to_dict()
        else:
            with pytest.raises(PlanInfeasibleError):
                recover(pattern, FailureEvent(sid))
    return checked


def test_random_patterns_recover_consistently():
    rng = np.random.default_rng(7)
    checked = sum(_check_recovery(_placed_pattern(rng, 6), seed) for seed in range(40))
    assert checked > 0


@pytest.mark.slow
def test_large_random_corpus_recovers_consistently():
    rng = np.random.default_rng(31)
    checked = sum(_check_recovery(_placed_pattern(rng, 6), seed) for seed in range(200))
    checked += sum(_check_recovery(_placed_pattern(rng, 8), seed) for seed in range(100))
    assert checked > 0
