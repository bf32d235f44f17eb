"""Sensor-failure recovery planning."""

from .planner import (
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

__all__ = [
    "FailureEvent",
    "RecoveryPlan",
    "apply_plan",
    "apply_plans",
    "plan_alpha_recovery",
    "plan_beta_recovery",
    "plan_recovery",
    "plan_sequence",
    "recover",
    "retire_sensor",
]
