#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Recovery planning after a sensor failure.

An alpha sensor is replaced by a measurement of another member of its
contraction set; a beta sensor by another member of its parent SCC. Every
candidate is verified by substitution: the failed role's states are dropped
from the failed sensor, a replacement measures the candidate, and the result
must be structurally observable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from ..errors import MisclassifiedSensorError, PlanInfeasibleError, RecoveryConsistencyError
from ..type_defs import Connectivity, Orientation, SensorType
from ..structure.analysis import (
    SensorClassification,
    classify_sensors,
    structural_observability,
)
from ..structure.contraction import contraction_sets
from ..structure.pattern import SystemPattern
from ..structure.scc import scc_partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FailureEvent:
    sensor_id: str
    step: int = 0

    def __post_init__(self):
        if self.step < 0:
            raise ValueError(f"failure step must be nonnegative, got {self.step}")


@dataclass(frozen=True)
class RecoveryPlan:
    failed_sensor_id: str
    failed_type: SensorType
    failed_state: int
    target_id: int  # contraction id (alpha) or SCC id (beta)
    candidates: Tuple[int, ...]
    equivalent_states: Tuple[int, ...]
    chosen_state: Optional[int]
    connectivity: Connectivity
    replacement_id: str
    role_states: Tuple[int, ...] = ()  # states the role took from the failed sensor
    rejected: Dict[int, str] = field(default_factory=dict)
    diagnostic: str = ""

    @property
    def feasible(self) -> bool:
        return bool(self.equivalent_states)

    def to_dict(self) -> Dict:
        return {
            "failed_sensor_id": self.failed_sensor_id,
            "failed_type": self.failed_type.value,
            "failed_state": self.failed_state,
            "target_id": self.target_id,
            "candidates": list(self.candidates),
            "equivalent_states": list(self.equivalent_states),
            "chosen_state": self.chosen_state,
            "connectivity": self.connectivity.value,
            "replacement_id": self.replacement_id,
            "role_states": list(self.role_states),
            "feasible": self.feasible,
            "rejected": {str(k): v for k, v in sorted(self.rejected.items())},
            "diagnostic": self.diagnostic,
        }


def _fresh_ids(pattern: SystemPattern, sensor_id: str) -> Iterator[str]:
    """Replacement ids: the failed id followed by primes, skipping ids in use."""
    primes = 1
    while True:
        candidate = sensor_id + "'" * primes
        if candidate not in pattern.measurement_entries:
            yield candidate
        primes += 1


def _substitute(
    pattern: SystemPattern,
    sensor_id: str,
    dropped: FrozenSet[int],
    replacement_id: str,
    candidate: int,
) -> SystemPattern:
    # an earlier role of the same sensor may already have taken its last state
    remaining = pattern.measurement_entries.get(sensor_id, frozenset()) - dropped
    substituted = pattern
    if sensor_id in pattern.measurement_entries:
        substituted = pattern.without_sensor(sensor_id)
    if remaining:
        substituted = substituted.with_sensor(sensor_id, remaining)
    return substituted.with_sensor(replacement_id, [candidate])


def _verified_plan(
    pattern: SystemPattern,
    orientation: Orientation,
    sensor_id: str,
    failed_type: SensorType,
    target_id: int,
    role_states: FrozenSet[int],
    group: FrozenSet[int],
    replacement_id: str,
) -> RecoveryPlan:
    failed_state = min(role_states)
    candidates = tuple(sorted(group - {failed_state}))
    equivalent: List[int] = []
    rejected: Dict[int, str] = {}
    for candidate in candidates:
        trial = _substitute(pattern, sensor_id, role_states, replacement_id, candidate)
        verdict = structural_observability(trial, orientation)
        if verdict.observable:
            equivalent.append(candidate)
        else:
            rejected[candidate] = "; ".join(verdict.messages())

    connectivity = Connectivity.HUB if failed_type is SensorType.ALPHA else Connectivity.STRONGLY_CONNECTED
    chosen = equivalent[0] if equivalent else None
    if not candidates:
        kind = "contraction set" if failed_type is SensorType.ALPHA else "parent SCC (self-cycle)"
        diagnostic = f"{kind} {sorted(group)} is a singleton; there is no equivalent state"
    elif not equivalent:
        diagnostic = f"no candidate in {list(candidates)} restores structural observability"
    else:
        diagnostic = f"measure state {chosen} with {connectivity.value} connectivity"

    plan = RecoveryPlan(
        failed_sensor_id=sensor_id,
        failed_type=failed_type,
        failed_state=failed_state,
        target_id=target_id,
        candidates=candidates,
        equivalent_states=tuple(equivalent),
        chosen_state=chosen,
        connectivity=connectivity,
        replacement_id=replacement_id,
        role_states=tuple(sorted(role_states)),
        rejected=rejected,
        diagnostic=diagnostic,
    )
    if rejected:
        logger.info(f"plan for {sensor_id}: rejected candidates {rejected}")
    logger.info(
        f"plan for {sensor_id} ({failed_type.value}): "
        f"{'feasible' if plan.feasible else 'infeasible'}, {diagnostic}"
    )
    return plan


def _roles(
    pattern: SystemPattern,
    orientation: Orientation,
    sensor_id: str,
    classification: SensorClassification,
    types: Tuple[SensorType, ...] = (SensorType.ALPHA, SensorType.BETA),
) -> List[Tuple[SensorType, int, FrozenSet[int], FrozenSet[int]]]:
    """(type, target id, measured states of the role, group) for every role the sensor holds."""
    measured = pattern.sensor_states(sensor_id)
    role = classification[sensor_id]
    roles = []
    if SensorType.ALPHA in types and role.covered_contractions:
        by_id = {c.id: c for c in contraction_sets(pattern, orientation)}
        for cid in role.covered_contractions:
            states = by_id[cid].states
            roles.append((SensorType.ALPHA, cid, measured & states, states))
    if SensorType.BETA in types and role.covered_parent_sccs:
        partition = scc_partition(pattern)
        for cid in role.covered_parent_sccs:
            comp = partition.component(cid)
            roles.append((SensorType.BETA, cid, measured & comp, comp))
    return roles


def _plan_roles(
    pattern: SystemPattern,
    orientation: Orientation,
    sensor_id: str,
    roles: Sequence[Tuple[SensorType, int, FrozenSet[int], FrozenSet[int]]],
) -> List[RecoveryPlan]:
    """
    Plan the roles one after another. Each role is verified on the pattern with
    the earlier feasible plans already substituted, so applying the plans in
    order reproduces exactly the patterns that were checked.
    """
    fresh_ids = _fresh_ids(pattern, sensor_id)
    current = pattern
    plans = []
    for failed_type, target_id, role_states, group in roles:
        plan = _verified_plan(
            current, orientation, sensor_id, failed_type, target_id, role_states, group, next(fresh_ids)
        )
        if plan.feasible:
            current = _substitute_plan(current, plan)
        plans.append(plan)
    return plans


def plan_alpha_recovery(
    pattern: SystemPattern,
    failed: FailureEvent,
    orientation: Orientation = Orientation.TRANSPOSED,
) -> RecoveryPlan:
    """Plan for the first contraction set the failed alpha sensor covers."""
    pattern.sensor_states(failed.sensor_id)
    classification = classify_sensors(pattern, orientation)
    role = classification[failed.sensor_id]
    if role.type is not SensorType.ALPHA:
        raise MisclassifiedSensorError(failed.sensor_id, SensorType.ALPHA.value, role.type.value)
    roles = _roles(pattern, orientation, failed.sensor_id, classification, (SensorType.ALPHA,))
    return _plan_roles(pattern, orientation, failed.sensor_id, roles[:1])[0]


def plan_beta_recovery(
    pattern: SystemPattern,
    failed: FailureEvent,
    orientation: Orientation = Orientation.TRANSPOSED,
) -> RecoveryPlan:
    pattern.sensor_states(failed.sensor_id)
    classification = classify_sensors(pattern, orientation)
    role = classification[failed.sensor_id]
    if role.type is not SensorType.BETA:
        raise MisclassifiedSensorError(failed.sensor_id, SensorType.BETA.value, role.type.value)
    roles = _roles(pattern, orientation, failed.sensor_id, classification, (SensorType.BETA,))
    return _plan_roles(pattern, orientation, failed.sensor_id, roles[:1])[0]


def plan_recovery(
    pattern: SystemPattern,
    failed: FailureEvent,
    orientation: Orientation = Orientation.TRANSPOSED,
) -> List[RecoveryPlan]:
    """One plan per role the failed sensor held; empty for a redundant sensor."""
    pattern.sensor_states(failed.sensor_id)
    classification = classify_sensors(pattern, orientation)
    if classification[failed.sensor_id].type is SensorType.REDUNDANT:
        logger.info(f"sensor {failed.sensor_id} is redundant; no recovery needed")
        return []
    roles = _roles(pattern, orientation, failed.sensor_id, classification)
    return _plan_roles(pattern, orientation, failed.sensor_id, roles)


def _check_applicable(plan: RecoveryPlan) -> None:
    if not plan.feasible:
        raise PlanInfeasibleError(plan)
    if plan.chosen_state == plan.failed_state:
        raise PlanInfeasibleError(plan, "replacement state equals the failed state")


def _substitute_plan(pattern: SystemPattern, plan: RecoveryPlan) -> SystemPattern:
    dropped = frozenset(plan.role_states or (plan.failed_state,))
    return _substitute(pattern, plan.failed_sensor_id, dropped, plan.replacement_id, plan.chosen_state)


def apply_plans(
    pattern: SystemPattern,
    plans: Sequence[RecoveryPlan],
    orientation: Orientation = Orientation.TRANSPOSED,
) -> SystemPattern:
    """
    Apply the plans in order, each exactly as it was verified: the role's
    states leave the failed sensor, its other states stay under the same id,
    and the replacement measures the chosen state.
    """
    if not plans:
        return pattern
    for plan in plans:
        _check_applicable(plan)
    for failed_id in dict.fromkeys(p.failed_sensor_id for p in plans):
        pattern.sensor_states(failed_id)

    result = pattern
    for plan in plans:
        result = _substitute_plan(result, plan)

    verdict = structural_observability(result, orientation)
    if not verdict.observable:
        raise RecoveryConsistencyError(plans[0], verdict.messages())
    return result


def apply_plan(
    pattern: SystemPattern,
    plan: RecoveryPlan,
    orientation: Orientation = Orientation.TRANSPOSED,
) -> SystemPattern:
    return apply_plans(pattern, [plan], orientation)


def retire_sensor(
    pattern: SystemPattern,
    sensor_id: str,
    orientation: Orientation = Orientation.TRANSPOSED,
) -> SystemPattern:
    """
    Remove whatever the failed sensor still measures after its roles were
    replaced. Those states lie outside every contraction set and designated
    parent SCC, so the verdict must not change.
    """
    if sensor_id not in pattern.measurement_entries:
        return pattern
    result = pattern.without_sensor(sensor_id)
    verdict = structural_observability(result, orientation)
    if not verdict.observable:
        raise RecoveryConsistencyError(None, verdict.messages())
    return result


def recover(
    pattern: SystemPattern,
    failed: FailureEvent,
    orientation: Orientation = Orientation.TRANSPOSED,
) -> Tuple[SystemPattern, List[RecoveryPlan]]:
    """Plan every role of a failed sensor, apply the plans and retire the sensor."""
    plans = plan_recovery(pattern, failed, orientation)
    for plan in plans:
        if not plan.feasible:
            raise PlanInfeasibleError(plan)
    recovered = apply_plans(pattern, plans, orientation)
    return retire_sensor(recovered, failed.sensor_id, orientation), plans


def plan_sequence(
    pattern: SystemPattern,
    failures: Sequence[FailureEvent],
    orientation: Orientation = Orientation.TRANSPOSED,
) -> Tuple[SystemPattern, List[List[RecoveryPlan]]]:
    """Sequential greedy recovery: plan and apply one failure at a time, in event order."""
    current = pattern
    history: List[List[RecoveryPlan]] = []
    for event in sorted(failures, key=lambda e: e.step):
        current, plans = recover(current, event, orientation)
        history.append(plans)
    return current, history
