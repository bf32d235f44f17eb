"""Benchmark experiment over several seeds (slow)."""

from __future__ import annotations

import numpy as np
import pytest

from struct_recovery.const import DEFAULT_NOISE
from struct_recovery.sim.harness import run
from struct_recovery.sim.scenario import NOMINAL_LABEL, build_benchmark_scenario
from struct_recovery.structure.analysis import structural_observability
from struct_recovery.type_defs import Verdict

SEEDS = range(10)
STEADY_STATE_LIMIT = 100 * DEFAULT_NOISE**2


@pytest.fixture(scope="module")
def nominal_reports():
    return {seed: run(build_benchmark_scenario(seed, trials=100, horizon=100)) for seed in SEEDS}


def _nominal_ok(report) -> bool:
    phase = report.phase(NOMINAL_LABEL)
    steady = [float(np.mean(report.mse[sid][-10:])) for sid in phase.sensor_ids]
    return (
        phase.observable
        and phase.gain_certified
        and phase.rho < 0.98
        and all(v is Verdict.BOUNDED for v in phase.sensor_verdicts.values())
        and max(steady) < STEADY_STATE_LIMIT
    )


@pytest.mark.slow
@pytest.mark.parametrize("seed", SEEDS)
def test_nominal_benchmark_is_distributed_observable(nominal_reports, seed):
    phase = nominal_reports[seed].phase(NOMINAL_LABEL)

    assert phase.observable
    assert len(phase.sensor_ids) == 3


@pytest.mark.slow
def test_nominal_benchmark_is_bounded_on_most_seeds(nominal_reports):
    passing = [seed for seed, report in nominal_reports.items() if _nominal_ok(report)]
    assert len(passing) >= 9, f"only seeds {passing} are certified, bounded and settled"


@pytest.mark.slow
@pytest.mark.parametrize("seed", SEEDS)
def test_unrecovered_beta_failure_diverges(seed):
    scenario = build_benchmark_scenario(seed, failure="beta", trials=20)
    report = run(scenario)

    failed = next(p for p in report.phases if p.label.startswith("failure:"))
    assert not failed.observable
    assert failed.verdict is Verdict.DIVERGENT
    assert report.phase(NOMINAL_LABEL).observable


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_unrecovered_alpha_failure_loses_observability(seed):
    scenario = build_benchmark_scenario(seed, failure="alpha", trials=5, horizon=40)
    report = run(scenario)

    alpha = scenario.events[0].sensor_id
    failed = report.phase(f"failure:{alpha}")
    assert not failed.observable
    assert not structural_observability(scenario.pattern.without_sensor(alpha)).observable


@pytest.mark.slow
@pytest.mark.parametrize("seed", SEEDS)
def test_immediate_beta_recovery_restores_observability(seed):
    scenario = build_benchmark_scenario(seed, failure="beta", recover=True, trials=20)
    report = run(scenario)

    recovered = report.phases[-1]
    assert recovered.observable
    assert structural_observability(scenario.pattern).observable
    assert recovered.gain_certified
    assert recovered.rho < 1.0
    assert recovered.verdict is Verdict.BOUNDED


@pytest.mark.slow
@pytest.mark.parametrize("seed", SEEDS)
def test_alpha_recovery_plans_stay_in_the_contraction_pair(seed):
    scenario = build_benchmark_scenario(seed, failure="alpha", recover=True, trials=5, horizon=40)
    report = run(scenario)

    plans = report.phases[-1].plans
    assert len(plans) == 1
    assert plans[0].failed_type.value == "alpha"
    assert plans[0].chosen_state != plans[0].failed_state
    assert report.phases[-1].observable
