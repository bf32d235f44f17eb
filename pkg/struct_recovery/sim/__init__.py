"""Monte Carlo harness: scenarios, phased simulation and reports."""

from .harness import PhaseResult, SimulationReport, divergence_verdict, run
from .report import MseRow, emit_csv, parse_csv, summary, write_outputs
from .scenario import (
    Phase,
    RecoveryEvent,
    Scenario,
    build_benchmark_scenario,
    compile_phases,
    generate_benchmark_pattern,
    generate_random_scenario,
    load_scenario,
    parse_scenario,
    save_scenario,
    serialize_scenario,
)

__all__ = [
    "MseRow",
    "Phase",
    "PhaseResult",
    "RecoveryEvent",
    "Scenario",
    "SimulationReport",
    "build_benchmark_scenario",
    "compile_phases",
    "divergence_verdict",
    "emit_csv",
    "generate_benchmark_pattern",
    "generate_random_scenario",
    "load_scenario",
    "parse_csv",
    "parse_scenario",
    "run",
    "save_scenario",
    "serialize_scenario",
    "summary",
    "write_outputs",
]
