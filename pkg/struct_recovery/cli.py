#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
struct-recovery command line.

Exit codes: 0 success, 1 any other toolkit error, 2 validation or parse error,
3 infeasibility finding, 4 verdict mismatch against scenario expectations.
"""

import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import typer
from rich.console import Console

from .adapters import OutputAdapter, RichOutputAdapter
from .errors import (
    PatternValidationError,
    PlanInfeasibleError,
    ScenarioError,
    StructRecoveryError,
    SystemFileError,
)
from .recovery.planner import FailureEvent, plan_sequence
from .sim.harness import run as run_scenario
from .sim.report import summary as simulation_summary
from .sim.report import write_outputs
from .sim.scenario import (
    build_benchmark_scenario,
    generate_random_scenario,
    load_scenario,
    save_scenario,
)
from .structure.analysis import analyze as analyze_pattern
from .structure.analysis import classify_sensors, minimal_sensor_placement
from .structure.system_file import load_system, save_system
from .type_defs import Orientation
from .utils.config import ToolkitConfig, get_config
from .utils.logs import define_log_level

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_MISMATCH = 4

EXIT_CODES = {
    "ok": EXIT_OK,
    "error": EXIT_ERROR,
    "validation": EXIT_VALIDATION,
    "infeasible": EXIT_INFEASIBLE,
    "mismatch": EXIT_MISMATCH,
}

app = typer.Typer(
    name="struct-recovery",
    help="🔧 struct-recovery - structural observability analysis and sensor-failure recovery",
    add_completion=False,
    rich_markup_mode="rich",
)

ORIENTATION_HELP = "Bipartite endpoint convention: paper or transposed"


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (PatternValidationError, SystemFileError, ScenarioError)):
        return EXIT_VALIDATION
    if isinstance(error, PlanInfeasibleError):
        return EXIT_INFEASIBLE
    return EXIT_ERROR


def _setup(verbose: bool, **overrides: Any) -> ToolkitConfig:
    config = get_config().merged(**overrides)
    define_log_level("DEBUG" if verbose else config.log_level, name="struct-recovery")
    return config


def _orientation(value: Optional[Orientation], config: ToolkitConfig) -> Orientation:
    return value if value is not None else Orientation(config.orientation)


@contextmanager
def _guard(adapter: OutputAdapter) -> Iterator[None]:
    """Report toolkit errors and exit with the mapped code."""
    try:
        yield
    except StructRecoveryError as e:
        logger.debug(f"{type(e).__name__}: {e}")
        adapter.error(str(e))
        raise typer.Exit(exit_code_for(e))


def _write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


@app.command()
def analyze(
    system: Path = typer.Argument(..., help="System file (JSON)"),
    orientation: Optional[Orientation] = typer.Option(None, "--orientation", "-o", help=ORIENTATION_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the analysis report JSON here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on the console"),
):
    """
    🔍 Structural observability analysis of a system file.

    Reports the maximum matching, unmatched states, contraction sets, SCCs,
    minimal placement, sensor roles and the verdict. Exit code 3 when the
    system is not structurally observable.

    System file: {"n": 3, "edges": \\[\\[1, 2], \\[2, 3]], "sensors": \\[{"id": "s1", "states": \\[3]}]}.
    Each edge pair means x_j -> x_i; states are 1-based.

    Report JSON (--out): {"n", "orientation", "matching": {"size", "pairs", "unmatched"},
    "contractions", "sccs", "placement", "classification", "unreachable",
    "verdict": {"observable", "violations"}, "runtime": {"timings"}}.
    """
    adapter = RichOutputAdapter(Console())
    config = _setup(verbose)
    with _guard(adapter):
        pattern = load_system(system)
        report = analyze_pattern(pattern, _orientation(orientation, config))
        adapter.analysis(report)
        if out is not None:
            payload = report.to_dict()
            payload["runtime"] = {"timings": report.timings}
            _write_json(out, payload)
            adapter.info(f"analysis report written to {out}")
    if not report.verdict.observable:
        raise typer.Exit(EXIT_INFEASIBLE)


@app.command()
def place(
    system: Path = typer.Argument(..., help="System file (JSON); its sensors are ignored"),
    out: Path = typer.Option(..., "--out", help="Write the system file with placed sensors here"),
    orientation: Optional[Orientation] = typer.Option(None, "--orientation", "-o", help=ORIENTATION_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on the console"),
):
    """
    📍 Minimal sensor placement: one sensor per free slot of each contraction
    set and one per uncovered parent SCC, written as sensors s1..sm.

    System file: {"n": 3, "edges": \\[\\[1, 2], \\[2, 3]], "sensors": \\[]}.
    The output is the same system file with the placed sensors filled in.
    """
    adapter = RichOutputAdapter(Console())
    config = _setup(verbose)
    with _guard(adapter):
        pattern = load_system(system)
        placement = minimal_sensor_placement(pattern, _orientation(orientation, config))
        placed = pattern.with_sensors(placement.to_sensors())
        adapter.placement(placement)
        save_system(placed, out)
        adapter.success(f"system with {placement.m} sensor(s) written to {out}")


@app.command()
def classify(
    system: Path = typer.Argument(..., help="System file (JSON)"),
    orientation: Optional[Orientation] = typer.Option(None, "--orientation", "-o", help=ORIENTATION_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the classification JSON here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on the console"),
):
    """
    🏷  Classify every sensor as alpha, beta or redundant.

    System file: {"n": 3, "edges": \\[\\[1, 2], \\[2, 3]], "sensors": \\[{"id": "s1", "states": \\[3]}]}.

    Classification JSON (--out): {"sensors": \\[{"id", "type", "states",
    "covered_contractions", "covered_parent_sccs", ...}], "violations": \\[...]}.
    """
    adapter = RichOutputAdapter(Console())
    config = _setup(verbose)
    with _guard(adapter):
        pattern = load_system(system)
        classification = classify_sensors(pattern, _orientation(orientation, config))
        adapter.classification(classification)
        if out is not None:
            _write_json(out, classification.to_dict())
            adapter.info(f"classification written to {out}")


@app.command("plan-recovery")
def plan_recovery_command(
    system: Path = typer.Argument(..., help="System file (JSON)"),
    sensor: List[str] = typer.Option(..., "--sensor", "-s", help="Failed sensor id (repeatable, in order)"),
    orientation: Optional[Orientation] = typer.Option(None, "--orientation", "-o", help=ORIENTATION_HELP),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the plan JSON here"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on the console"),
):
    """
    🛠  Plan the recovery of failed sensors, one at a time in the given order.

    Output JSON: {"feasible": true, "plans": \\[\\[plan, ...], ...], "system": system file}.
    A plan lists the failed sensor, its type, the candidate and equivalent
    states, the chosen state, the replacement id and the connectivity.
    Exit code 3 when a failure has no feasible plan.
    """
    adapter = RichOutputAdapter(Console())
    config = _setup(verbose)
    with _guard(adapter):
        pattern = load_system(system)
        events = [FailureEvent(sid, step) for step, sid in enumerate(sensor)]
        try:
            recovered, history = plan_sequence(pattern, events, _orientation(orientation, config))
        except PlanInfeasibleError as e:
            adapter.plans([e.plan])
            if out is not None:
                _write_json(out, {"feasible": False, "plans": [[e.plan.to_dict()]], "system": None})
            raise typer.Exit(EXIT_INFEASIBLE)
        for plans in history:
            adapter.plans(plans)
        if out is not None:
            _write_json(
                out,
                {
                    "feasible": True,
                    "plans": [[plan.to_dict() for plan in plans] for plans in history],
                    "system": recovered.to_dict(),
                },
            )
            adapter.info(f"recovery plan written to {out}")


@app.command()
def simulate(
    scenario: Path = typer.Argument(..., help="Scenario file (JSON)"),
    out: Path = typer.Option(..., "--out", help="Output directory for mse.csv and summary.json"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    rho: Optional[float] = typer.Option(None, "--rho", help="Spectral radius of A"),
    noise: Optional[float] = typer.Option(None, "--noise", help="Process and measurement noise std"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Monte Carlo trials"),
    horizon: Optional[int] = typer.Option(None, "--horizon", help="Steps per trial"),
    orientation: Optional[Orientation] = typer.Option(None, "--orientation", "-o", help=ORIENTATION_HELP),
    workers: Optional[int] = typer.Option(None, "--workers", help="Threads for the trial chunks"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on the console"),
):
    """
    📈 Run a scenario and write the MSE trajectories and a summary.

    Scenario file: {"name": "beta-failure", "system": <system file> or
    "system_file": "system.json", "rho": 1.1, "noise_system": 0.25,
    "noise_measurement": 0.25, "horizon": 100, "trials": 100, "seed": 1729,
    "scc_radii": {"2": 1.1}, "events": \\[{"kind": "failure", "sensor": "s2", "step": 30}],
    "expect": {"nominal": "bounded", "failure:s2": "divergent"}}.

    mse.csv has the header step,sensor_id,mse,phase. summary.json holds "scenario",
    "seed", "trials", "horizon", "mismatches", "runtime" and "phases": \\[{"label",
    "start", "end", "sensors", "rho", "observable", "gain_certified", "verdict",
    "sensor_verdicts", "expected", "matches", "steady_state_mse", "plans"}].
    Exit code 4 when a phase verdict differs from its expectation.
    """
    adapter = RichOutputAdapter(Console())
    config = _setup(verbose, workers=workers)
    with _guard(adapter):
        loaded = load_scenario(scenario, config)
        loaded = loaded.with_overrides(
            seed=seed,
            target_rho=rho,
            noise_system=noise,
            noise_measurement=noise,
            trials=trials,
            horizon=horizon,
        )
        report = run_scenario(
            loaded,
            _orientation(orientation, config),
            workers=config.workers,
            gain_margin=config.gain_margin,
            gain_budget=config.gain_budget,
        )
        csv_path, summary_path = write_outputs(report, out)
        adapter.simulation(simulation_summary(report))
        adapter.info(f"wrote {csv_path} and {summary_path}")
    if report.mismatches():
        raise typer.Exit(EXIT_MISMATCH)


@app.command()
def gen(
    out: Path = typer.Option(..., "--out", help="Write the scenario file here"),
    benchmark: bool = typer.Option(False, "--benchmark", help="Two parent SCCs plus one contraction pair"),
    n: int = typer.Option(10, "--n", help="Number of states"),
    density: float = typer.Option(0.2, "--density", help="Edge probability (random scenarios)"),
    failure: Optional[str] = typer.Option(None, "--failure", help="Benchmark failure: alpha or beta"),
    recover: bool = typer.Option(False, "--recover", help="Benchmark: recover the failed sensor"),
    failure_step: int = typer.Option(30, "--failure-step", help="Benchmark failure step"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Generator and master seed"),
    rho: Optional[float] = typer.Option(None, "--rho", help="Spectral radius of A"),
    noise: Optional[float] = typer.Option(None, "--noise", help="Process and measurement noise std"),
    trials: Optional[int] = typer.Option(None, "--trials", help="Monte Carlo trials"),
    horizon: Optional[int] = typer.Option(None, "--horizon", help="Steps per trial"),
    orientation: Optional[Orientation] = typer.Option(None, "--orientation", "-o", help=ORIENTATION_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on the console"),
):
    """
    🎲 Generate a scenario file: a random pattern with minimal placement, or
    the benchmark system with an optional alpha or beta failure.

    The file written is a scenario file with the system inline: {"name",
    "system": {"n", "edges": \\[\\[j, i], ...], "sensors": \\[{"id", "states"}]},
    "rho", "noise_system", "noise_measurement", "horizon", "trials", "seed",
    "scc_radii": {"<scc id>": radius}, "events": \\[{"kind": "failure" or "recovery",
    "sensor", "step"}], "expect": {"<phase label>": "bounded" or "divergent"}}.
    Feed it to simulate.
    """
    adapter = RichOutputAdapter(Console())
    config = _setup(verbose, seed=seed, rho=rho, noise=noise, trials=trials, horizon=horizon)
    settings = {
        "target_rho": config.rho,
        "noise_system": config.noise,
        "noise_measurement": config.noise,
        "trials": config.trials,
        "horizon": config.horizon,
    }
    with _guard(adapter):
        if benchmark:
            scenario = build_benchmark_scenario(
                config.seed,
                failure=failure,
                recover=recover,
                failure_step=failure_step,
                n=n,
                orientation=_orientation(orientation, config),
                **settings,
            )
        else:
            scenario = generate_random_scenario(
                n, density, config.seed, orientation=_orientation(orientation, config), **settings
            )
        save_scenario(scenario, out)
        adapter.success(
            f"scenario {scenario.name} (n={scenario.pattern.n}, "
            f"m={len(scenario.pattern.measurement_entries)}) written to {out}"
        )


def run():
    """Entry point for pyproject.toml scripts."""
    app()


if __name__ == "__main__":
    app()
