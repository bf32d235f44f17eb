#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Monte Carlo harness: truth and distributed estimator over a phased scenario.

Per trial ``t`` the truth stream is ``default_rng([seed, t, 0])`` (initial
state, then process noise) and sensor ``q`` of the sorted registry of every
sensor id ever alive draws its measurement noise from
``default_rng([seed, t, q + 1])``. Trials are simulated in fixed-size chunks,
so results do not depend on the worker count.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..const import (
    DEFAULT_GAIN_BUDGET,
    DEFAULT_GAIN_MARGIN,
    DIVERGENCE_CEILING,
    DIVERGENCE_GROWTH,
    DIVERGENCE_WINDOW,
)
from ..errors import GainSynthesisError, ObservabilityGuardError
from ..estimator.filter import StepOperators, fused_step
from ..estimator.gain import GainMatrix, design_gain, error_dynamics, verify_certificate
from ..estimator.network import EstimatorNetwork, build_DH, build_network, stacked_dynamics
from ..estimator.numeric import NumericSystem, instantiate
from ..estimator.observability import distributed_observability
from ..recovery.planner import RecoveryPlan
from ..structure.analysis import classify_sensors, structural_observability
from ..type_defs import Orientation, Verdict
from .scenario import Phase, Scenario, compile_phases

logger = logging.getLogger(__name__)

CHUNK_TRIALS = 25
DICHOTOMY_MARGIN = 0.01


def divergence_verdict(mse: np.ndarray) -> Verdict:
    """
    Divergent iff the mean of the last window exceeds DIVERGENCE_GROWTH times
    the mean of the first window, or any value exceeds DIVERGENCE_CEILING.
    Phases shorter than two windows use half their length.
    """
    mse = np.asarray(mse, dtype=float)
    if mse.size == 0:
        return Verdict.BOUNDED
    if not np.all(np.isfinite(mse)) or np.any(mse > DIVERGENCE_CEILING):
        return Verdict.DIVERGENT
    window = min(DIVERGENCE_WINDOW, max(1, mse.size // 2))
    head = float(np.mean(mse[:window]))
    tail = float(np.mean(mse[-window:]))
    if tail > DIVERGENCE_GROWTH * head:
        return Verdict.DIVERGENT
    return Verdict.BOUNDED


def rho_verdict(rho: float, steps: int) -> Optional[Verdict]:
    """
    The MSE verdict the closed-loop spectral radius predicts for a phase of
    ``steps`` steps: bounded below ``1 - DICHOTOMY_MARGIN``, divergent when
    rho^(steps - window) reaches DIVERGENCE_GROWTH (the squared error then
    grows by its square). None in between.
    """
    if rho <= 1.0 - DICHOTOMY_MARGIN:
        return Verdict.BOUNDED
    window = min(DIVERGENCE_WINDOW, max(1, steps // 2))
    if rho >= 1.0 + DICHOTOMY_MARGIN and (steps - window) * np.log(rho) >= np.log(DIVERGENCE_GROWTH):
        return Verdict.DIVERGENT
    return None


@dataclass
class PhaseResult:
    label: str
    start: int
    end: int
    sensor_ids: List[str]
    rho: float
    observable: bool
    gain_certified: bool
    verdict: Verdict
    sensor_verdicts: Dict[str, Verdict]
    expected: Optional[Verdict] = None
    plans: List[RecoveryPlan] = field(default_factory=list)

    @property
    def matches(self) -> bool:
        return self.expected is None or self.expected is self.verdict

    @property
    def agrees_with_rho(self) -> bool:
        predicted = rho_verdict(self.rho, self.end - self.start + 1)
        return predicted is None or predicted is self.verdict


@dataclass
class SimulationReport:
    name: str
    seed: int
    trials: int
    horizon: int
    mse: Dict[str, np.ndarray]  # per sensor, length horizon, NaN where not alive
    phases: List[PhaseResult]
    runtime: Dict[str, float] = field(default_factory=dict)

    @property
    def sensor_ids(self) -> List[str]:
        return sorted(self.mse)

    def phase_at(self, step: int) -> PhaseResult:
        for phase in self.phases:
            if phase.start <= step <= phase.end:
                return phase
        raise KeyError(f"step {step} is outside [1, {self.horizon}]")

    def phase(self, label: str) -> PhaseResult:
        for phase in self.phases:
            if phase.label == label:
                return phase
        raise KeyError(label)

    def mismatches(self) -> List[PhaseResult]:
        return [p for p in self.phases if not p.matches]


@dataclass
class _PhaseSetup:
    phase: Phase
    system: NumericSystem
    network: EstimatorNetwork
    gain: GainMatrix
    ops: StepOperators
    rho: float
    observable: bool
    certified: bool


def _phase_observable(system: NumericSystem, network: EstimatorNetwork, orientation: Orientation) -> bool:
    try:
        return distributed_observability(stacked_dynamics(system, network), build_DH(system, network))
    except ObservabilityGuardError as e:
        logger.info(f"{e}; falling back to the structural verdict")
        return structural_observability(system.pattern, orientation).observable


def _prepare_phases(
    scenario: Scenario,
    phases: Sequence[Phase],
    orientation: Orientation,
    gain_margin: float,
    gain_budget: int,
) -> List[_PhaseSetup]:
    base = instantiate(
        scenario.pattern,
        scenario.target_rho,
        scenario.seed,
        noise=scenario.noise_system,
        measurement_noise=scenario.noise_measurement,
        scc_radii=scenario.scc_radii or None,
    )
    setups: List[_PhaseSetup] = []
    previous: Optional[GainMatrix] = None
    for phase in phases:
        system = base.with_pattern(phase.pattern)
        classification = classify_sensors(phase.pattern, orientation)
        network = build_network(classification, seed=[scenario.seed, 7, phase.index])
        observable = _phase_observable(system, network, orientation)

        certified = False
        if observable:
            try:
                gain = design_gain(
                    system, network, gain_margin, gain_budget, seed=scenario.seed, check_observability=False
                )
                certified = True
            except GainSynthesisError as e:
                logger.warning(f"phase {phase.label}: using the best uncertified gain (rho {e.best_rho:.6f})")
                gain = e.best_gain
        elif previous is not None:
            logger.info(f"phase {phase.label}: not observable, surviving sensors keep their gains")
            gain = previous.restricted(network.sensor_ids, system.n)
        else:
            gain = GainMatrix.zeros(network.sensor_ids, system.n)

        dynamics = error_dynamics(system, network, gain)
        if certified:
            by_eig, by_power = verify_certificate(dynamics, 1.0 - gain_margin, seed=scenario.seed)
            logger.debug(f"phase {phase.label}: certificate rho={by_eig:.6f}, power iteration {by_power:.6f}")
        setups.append(
            _PhaseSetup(
                phase=phase,
                system=system,
                network=network,
                gain=gain,
                ops=StepOperators.build(system, network, gain),
                rho=dynamics.spectral_radius,
                observable=observable,
                certified=certified,
            )
        )
        previous = gain
    return setups


def _simulate_chunk(
    scenario: Scenario,
    setups: Sequence[_PhaseSetup],
    registry: Dict[str, int],
    trials: Sequence[int],
) -> Dict[str, np.ndarray]:
    """Squared errors per sensor, shape ``(len(trials), horizon)``, NaN where not alive."""
    n = scenario.pattern.n
    count = len(trials)
    errors = {sid: np.full((count, scenario.horizon), np.nan) for sid in registry}
    truth_rngs = [np.random.default_rng([scenario.seed, t, 0]) for t in trials]
    sensor_rngs = {
        sid: [np.random.default_rng([scenario.seed, t, q + 1]) for t in trials] for sid, q in registry.items()
    }

    x = np.stack([rng.standard_normal(n) for rng in truth_rngs])
    estimates: Dict[str, np.ndarray] = {}
    sigma_v, sigma_r = scenario.noise_system, scenario.noise_measurement

    for setup in setups:
        ids = setup.network.sensor_ids
        survivors = [sid for sid in ids if sid in estimates]
        seed_estimate = (
            np.mean([estimates[sid] for sid in survivors], axis=0) if survivors else np.zeros((count, n))
        )
        stacked = np.stack([estimates.get(sid, seed_estimate) for sid in ids], axis=1)
        H = [setup.system.H[sid] for sid in ids]

        for step in range(setup.phase.start, setup.phase.end + 1):
            v = np.stack([rng.standard_normal(n) for rng in truth_rngs])
            x = x @ setup.system.A.T + sigma_v * v
            projected = np.empty((count, len(ids), n))
            for q, (sid, H_j) in enumerate(zip(ids, H)):
                r = np.stack([rng.standard_normal(H_j.shape[0]) for rng in sensor_rngs[sid]])
                y = x @ H_j.T + sigma_r * r
                projected[:, q, :] = y @ H_j
            stacked = fused_step(setup.ops, stacked, projected)
            sq = np.mean((stacked - x[:, None, :]) ** 2, axis=2)
            for q, sid in enumerate(ids):
                errors[sid][:, step - 1] = sq[:, q]

        estimates = {sid: stacked[:, q, :] for q, sid in enumerate(ids)}
    return errors


def _chunks(trials: int) -> List[List[int]]:
    return [list(range(lo, min(lo + CHUNK_TRIALS, trials))) for lo in range(0, trials, CHUNK_TRIALS)]


def _verdicts(setup: _PhaseSetup, mse: Dict[str, np.ndarray]) -> Tuple[Verdict, Dict[str, Verdict]]:
    phase = setup.phase
    per_sensor = {
        sid: divergence_verdict(mse[sid][phase.start - 1 : phase.end]) for sid in setup.network.sensor_ids
    }
    verdict = Verdict.DIVERGENT if Verdict.DIVERGENT in per_sensor.values() else Verdict.BOUNDED
    predicted = rho_verdict(setup.rho, phase.steps)
    if predicted is not None and predicted is not verdict:
        logger.warning(
            f"phase {phase.label}: closed-loop rho {setup.rho:.4f} disagrees with the {verdict.value} MSE verdict"
        )
    return verdict, per_sensor


def run(
    scenario: Scenario,
    orientation: Orientation = Orientation.TRANSPOSED,
    workers: int = 1,
    gain_margin: float = DEFAULT_GAIN_MARGIN,
    gain_budget: int = DEFAULT_GAIN_BUDGET,
) -> SimulationReport:
    """Simulate every phase of ``scenario`` and classify each phase's MSE."""
    started = time.perf_counter()
    phases = compile_phases(scenario, orientation)
    setups = _prepare_phases(scenario, phases, orientation, gain_margin, gain_budget)
    prepared = time.perf_counter()

    every_id = sorted({sid for setup in setups for sid in setup.network.sensor_ids})
    registry = {sid: q for q, sid in enumerate(every_id)}
    chunks = _chunks(scenario.trials)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(lambda chunk: _simulate_chunk(scenario, setups, registry, chunk), chunks))
    else:
        parts = [_simulate_chunk(scenario, setups, registry, chunk) for chunk in chunks]

    mse: Dict[str, np.ndarray] = {}
    with np.errstate(invalid="ignore", over="ignore"):
        for sid in every_id:
            stacked = np.concatenate([part[sid] for part in parts], axis=0)
            # all-NaN columns (sensor not alive) stay NaN
            alive = ~np.all(np.isnan(stacked), axis=0)
            series = np.full(scenario.horizon, np.nan)
            series[alive] = np.mean(stacked[:, alive], axis=0)
            mse[sid] = series

    results: List[PhaseResult] = []
    for setup in setups:
        verdict, per_sensor = _verdicts(setup, mse)
        expected = scenario.expect.get(setup.phase.label)
        result = PhaseResult(
            label=setup.phase.label,
            start=setup.phase.start,
            end=setup.phase.end,
            sensor_ids=list(setup.network.sensor_ids),
            rho=setup.rho,
            observable=setup.observable,
            gain_certified=setup.certified,
            verdict=verdict,
            sensor_verdicts=per_sensor,
            expected=expected,
            plans=list(setup.phase.plans),
        )
        logger.info(
            f"phase {result.label} [{result.start}-{result.end}]: rho={result.rho:.4f} "
            f"observable={result.observable} verdict={verdict.value}"
            + ("" if result.matches else f" (expected {expected.value})")
        )
        results.append(result)

    finished = time.perf_counter()
    return SimulationReport(
        name=scenario.name,
        seed=scenario.seed,
        trials=scenario.trials,
        horizon=scenario.horizon,
        mse=mse,
        phases=results,
        runtime={
            "setup_seconds": prepared - started,
            "simulation_seconds": finished - prepared,
            "total_seconds": finished - started,
            "workers": workers,
        },
    )
