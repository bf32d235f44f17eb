#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Exception hierarchy for struct-recovery.

The CLI maps these onto its exit-code contract (see ``cli.EXIT_CODES``).
"""

from typing import Any, List, Optional, Sequence


class StructRecoveryError(Exception):
    """Base class for every error raised by the toolkit."""


# ============ Validation ============
class PatternValidationError(StructRecoveryError):
    """A system pattern, bipartite graph or matching violates its invariants."""

    def __init__(self, message: str, offending: Any = None):
        self.offending = offending
        super().__init__(message)


class SystemFileError(StructRecoveryError):
    """A system or scenario file cannot be read or does not match its schema."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(message)

    def __str__(self) -> str:
        location = self.path or "<input>"
        if self.line is not None:
            location += f":{self.line}"
            if self.column is not None:
                location += f":{self.column}"
        return f"{location}: {self.args[0]}"


class ScenarioError(StructRecoveryError):
    """Scenario invariants violated (event order, unknown sensors, bad sizes)."""


# ============ Recovery ============
class MisclassifiedSensorError(StructRecoveryError):
    def __init__(self, sensor_id: str, expected: str, actual: str):
        self.sensor_id = sensor_id
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"sensor {sensor_id!r} is classified {actual}, not {expected}"
        )


class PlanInfeasibleError(StructRecoveryError):
    """An infeasible recovery plan was applied or scheduled."""

    def __init__(self, plan: Any, message: Optional[str] = None):
        self.plan = plan
        super().__init__(
            message
            or f"recovery plan for sensor {plan.failed_sensor_id!r} is infeasible: "
            f"{plan.diagnostic}"
        )


class RecoveryConsistencyError(StructRecoveryError):
    """A substituted pattern failed its observability re-check."""

    def __init__(self, plan: Any, violations: Sequence[str]):
        self.plan = plan
        self.violations: List[str] = list(violations)
        super().__init__(
            "substituted pattern is not structurally observable: "
            + "; ".join(self.violations)
        )


# ============ Numeric layer ============
class ObservabilityGuardError(StructRecoveryError):
    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(
            f"distributed observability test limited to mn <= {limit} (got {size}); "
            "use the structural test instead"
        )


class ObservabilityCrossCheckError(StructRecoveryError):
    def __init__(self, rank_verdict: bool, pbh_verdict: bool, detail: str = ""):
        self.rank_verdict = rank_verdict
        self.pbh_verdict = pbh_verdict
        super().__init__(
            f"rank test says {rank_verdict}, PBH test says {pbh_verdict}"
            + (f" ({detail})" if detail else "")
        )


class GainPreconditionError(StructRecoveryError):
    """Gain synthesis requested for a pair that is not distributed-observable."""


class GainSynthesisError(StructRecoveryError):
    def __init__(self, best_rho: float, evaluations: int, target: float, best_gain: Any = None):
        self.best_rho = best_rho
        self.evaluations = evaluations
        self.target = target
        self.best_gain = best_gain
        super().__init__(
            f"no block-diagonal gain with rho < {target:.4f} found after "
            f"{evaluations} evaluations (best rho {best_rho:.6f})"
        )


class OracleDisagreementError(StructRecoveryError):
    """Independent random instantiations returned different rank verdicts."""
