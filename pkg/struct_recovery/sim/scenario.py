#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Scenarios: a pattern, numeric knobs, a timed event list and expected verdicts.

Scenario file schema (UTF-8 JSON)::

    {
      "name": "beta-failure",
      "system": {"n": 3, "edges": [[1, 2]], "sensors": [{"id": "s1", "states": [2]}]},
      "rho": 1.1, "noise_system": 0.25, "noise_measurement": 0.25,
      "horizon": 100, "trials": 100, "seed": 1729,
      "scc_radii": {"2": 1.1},
      "events": [{"kind": "failure", "sensor": "s1", "step": 30},
                 {"kind": "recovery", "sensor": "s1", "step": 30}],
      "expect": {"nominal": "bounded", "failure:s1+recovery:s1": "bounded"}
    }

``system_file`` (a path relative to the scenario file) may replace ``system``.
Omitted numeric fields fall back to the toolkit config. Steps run from 1 to
``horizon``; an event at step k takes effect from step k on.

Phase labels are ``nominal`` followed by one label per event step, joining
``failure:<id>`` and ``recovery:<id>`` with ``+`` in event order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from itertools import groupby
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..const import DEFAULT_HORIZON, DEFAULT_NOISE, DEFAULT_RHO, DEFAULT_SEED, DEFAULT_TRIALS
from ..errors import ScenarioError, SystemFileError
from ..recovery.planner import FailureEvent, RecoveryPlan, recover
from ..structure.analysis import (
    classify_sensors,
    minimal_sensor_placement,
    structural_observability,
)
from ..structure.contraction import contraction_sets
from ..structure.pattern import SystemPattern
from ..structure.scc import scc_partition
from ..structure.system_file import (
    SystemFileModel,
    describe_validation_error,
    load_json_document,
    load_system,
    read_text,
)
from ..type_defs import EventKind, Orientation, SensorType, Verdict
from ..utils.config import ToolkitConfig

logger = logging.getLogger(__name__)

NOMINAL_LABEL = "nominal"


@dataclass(frozen=True)
class RecoveryEvent:
    """Apply the recovery plan(s) for a previously failed sensor."""

    sensor_id: str
    step: int = 0


ScenarioEvent = Union[FailureEvent, RecoveryEvent]


def event_kind(event: ScenarioEvent) -> EventKind:
    return EventKind.RECOVERY if isinstance(event, RecoveryEvent) else EventKind.FAILURE


def event_label(event: ScenarioEvent) -> str:
    return f"{event_kind(event).value}:{event.sensor_id}"


@dataclass
class Scenario:
    pattern: SystemPattern
    target_rho: float = DEFAULT_RHO
    noise_system: float = DEFAULT_NOISE
    noise_measurement: float = DEFAULT_NOISE
    horizon: int = DEFAULT_HORIZON
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    events: List[ScenarioEvent] = field(default_factory=list)
    expect: Dict[str, Verdict] = field(default_factory=dict)
    scc_radii: Dict[int, float] = field(default_factory=dict)
    name: str = "scenario"

    def validate(self) -> None:
        if self.horizon < 1:
            raise ScenarioError(f"horizon must be at least 1, got {self.horizon}")
        if self.trials < 1:
            raise ScenarioError(f"trials must be at least 1, got {self.trials}")
        if self.target_rho <= 0:
            raise ScenarioError(f"rho must be positive, got {self.target_rho}")
        if self.noise_system < 0 or self.noise_measurement < 0:
            raise ScenarioError("noise levels must be nonnegative")
        if not self.pattern.measurement_entries:
            raise ScenarioError("scenario system has no sensors")
        previous = 0
        for event in self.events:
            if not 1 <= event.step <= self.horizon:
                raise ScenarioError(
                    f"event {event_label(event)} at step {event.step} is outside [1, {self.horizon}]"
                )
            if event.step < previous:
                raise ScenarioError(
                    f"events are not time-ordered: {event_label(event)} at step {event.step} "
                    f"follows step {previous}"
                )
            previous = event.step

    def with_overrides(self, **overrides: Any) -> "Scenario":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "system": self.pattern.to_dict(),
            "rho": self.target_rho,
            "noise_system": self.noise_system,
            "noise_measurement": self.noise_measurement,
            "horizon": self.horizon,
            "trials": self.trials,
            "seed": self.seed,
            "scc_radii": {str(k): v for k, v in sorted(self.scc_radii.items())},
            "events": [
                {"kind": event_kind(e).value, "sensor": e.sensor_id, "step": e.step}
                for e in self.events
            ],
            "expect": {label: verdict.value for label, verdict in self.expect.items()},
        }


# ============ Scenario files ============
class EventEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: EventKind
    sensor: str
    step: int = Field(ge=1)

    @field_validator("sensor", mode="before")
    @classmethod
    def _stringify_sensor(cls, value):
        if isinstance(value, int) and not isinstance(value, bool):
            return str(value)
        return value


class ScenarioFileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    system: Optional[SystemFileModel] = None
    system_file: Optional[str] = None
    rho: Optional[float] = Field(default=None, gt=0)
    noise_system: Optional[float] = Field(default=None, ge=0)
    noise_measurement: Optional[float] = Field(default=None, ge=0)
    horizon: Optional[int] = Field(default=None, ge=1)
    trials: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    scc_radii: Dict[int, float] = Field(default_factory=dict)
    events: List[EventEntry] = Field(default_factory=list)
    expect: Dict[str, Verdict] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _one_system_source(self):
        if (self.system is None) == (self.system_file is None):
            raise ValueError("exactly one of 'system' and 'system_file' is required")
        return self

    def to_scenario(self, base_dir: Path, defaults: ToolkitConfig) -> Scenario:
        if self.system is not None:
            pattern = self.system.to_pattern()
        else:
            pattern = load_system(base_dir / str(self.system_file))
        events: List[ScenarioEvent] = [
            FailureEvent(e.sensor, e.step) if e.kind is EventKind.FAILURE else RecoveryEvent(e.sensor, e.step)
            for e in self.events
        ]
        return Scenario(
            pattern=pattern,
            target_rho=self.rho if self.rho is not None else defaults.rho,
            noise_system=self.noise_system if self.noise_system is not None else defaults.noise,
            noise_measurement=(
                self.noise_measurement if self.noise_measurement is not None else defaults.noise
            ),
            horizon=self.horizon if self.horizon is not None else defaults.horizon,
            trials=self.trials if self.trials is not None else defaults.trials,
            seed=self.seed if self.seed is not None else defaults.seed,
            events=events,
            expect=dict(self.expect),
            scc_radii=dict(self.scc_radii),
            name=self.name or "scenario",
        )


def parse_scenario(
    text: str,
    path: Optional[str] = None,
    defaults: Optional[ToolkitConfig] = None,
) -> Scenario:
    document = load_json_document(text, path)
    try:
        model = ScenarioFileModel.model_validate(document)
    except ValidationError as e:
        raise SystemFileError(describe_validation_error(e), path=path)
    base_dir = Path(path).parent if path else Path.cwd()
    scenario = model.to_scenario(base_dir, defaults or ToolkitConfig())
    scenario.validate()
    return scenario


def load_scenario(path: Union[str, Path], defaults: Optional[ToolkitConfig] = None) -> Scenario:
    logger.debug(f"Loading scenario file {path}")
    return parse_scenario(read_text(path), str(path), defaults)


def serialize_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2) + "\n"


def save_scenario(scenario: Scenario, path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(serialize_scenario(scenario), encoding="utf-8")
    return target


# ============ Phases ============
@dataclass
class Phase:
    """A maximal step range with a fixed alive sensor set."""

    index: int
    label: str
    start: int
    end: int  # inclusive
    pattern: SystemPattern
    plans: List[RecoveryPlan] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return self.end - self.start + 1

    @property
    def sensor_ids(self) -> List[str]:
        return self.pattern.sensor_ids()


def _alive(planning: SystemPattern, pending: Set[str]) -> SystemPattern:
    return planning.with_sensors(
        {sid: states for sid, states in planning.measurement_entries.items() if sid not in pending}
    )


def compile_phases(
    scenario: Scenario, orientation: Orientation = Orientation.TRANSPOSED
) -> List[Phase]:
    """
    Split the horizon at event steps and plan every recovery up front.

    The planning pattern keeps failed sensors until their recovery is applied;
    the alive pattern of a phase drops the ones still pending.
    """
    scenario.validate()
    planning = scenario.pattern
    pending: Set[str] = set()
    phases: List[Phase] = []
    used_labels: Set[str] = set()

    label, start, plans = NOMINAL_LABEL, 1, []
    for step, group in groupby(scenario.events, key=lambda e: e.step):
        if step > start:
            phases.append(Phase(len(phases), label, start, step - 1, _alive(planning, pending), plans))
        plans = []
        group_events = list(group)
        for event in group_events:
            sid = event.sensor_id
            if isinstance(event, RecoveryEvent):
                if sid not in pending:
                    raise ScenarioError(f"recovery of {sid!r} at step {step} has no prior failure")
                planning, event_plans = recover(planning, FailureEvent(sid, step), orientation)
                pending.discard(sid)
                plans.extend(event_plans)
            else:
                if sid not in planning.measurement_entries:
                    raise ScenarioError(f"failure of unknown sensor {sid!r} at step {step}")
                if sid in pending:
                    raise ScenarioError(f"sensor {sid!r} fails twice (step {step})")
                pending.add(sid)

        label = "+".join(event_label(e) for e in group_events)
        if label in used_labels:
            label = f"{label}@{step}"
        used_labels.add(label)
        start = step
        if not _alive(planning, pending).measurement_entries:
            raise ScenarioError(f"no sensor is alive after step {step}")

    phases.append(Phase(len(phases), label, start, scenario.horizon, _alive(planning, pending), plans))

    labels = {p.label for p in phases}
    unknown = sorted(set(scenario.expect) - labels)
    if unknown:
        raise ScenarioError(f"expectations name unknown phases {unknown}; phases are {sorted(labels)}")
    for phase in phases:
        logger.debug(f"phase {phase.label}: steps {phase.start}-{phase.end}, sensors {phase.sensor_ids}")
    return phases


# ============ Generators ============
def generate_random_scenario(n: int, density: float, seed: int, **settings: Any) -> Scenario:
    """
    Bernoulli(density) edges over all ordered state pairs, sensors from the minimal placement.

    An acyclic draw gets a self-loop on state 1 so that rho(A) can be rescaled.
    """
    if n < 1:
        raise ScenarioError(f"n must be at least 1, got {n}")
    if not 0 < density <= 1:
        raise ScenarioError(f"density must lie in (0, 1], got {density}")

    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < density
    edges = [(int(j) + 1, int(i) + 1) for j, i in zip(*np.nonzero(mask))]
    graph = nx.DiGraph()
    graph.add_nodes_from(range(1, n + 1))
    graph.add_edges_from(edges)
    if nx.is_directed_acyclic_graph(graph):
        edges.append((1, 1))

    bare = SystemPattern(n, edges)
    placement = minimal_sensor_placement(bare, settings.pop("orientation", Orientation.TRANSPOSED))
    pattern = bare.with_sensors(placement.to_sensors())
    settings.setdefault("seed", seed)
    settings.setdefault("name", f"random-n{n}-d{density:g}-s{seed}")
    return Scenario(pattern=pattern, **settings)


BENCHMARK_ATTEMPTS = 50


def _benchmark_edges(rng: np.random.Generator, n: int) -> List[tuple]:
    a, b, c, d = 0, 1, 2, 3
    first = (n - 4) // 2
    parents = [list(range(4, 4 + first)), list(range(4 + first, n))]
    edges = {(a, d), (b, d), (d, b), (d, parents[0][0]), (c, c), (c, a), (c, parents[1][0])}
    for cycle in parents:
        size = len(cycle)
        for k, node in enumerate(cycle):
            edges.add((node, cycle[(k + 1) % size]))
            if rng.random() < 0.3:
                edges.add((node, node))
            for other in cycle:
                if other != node and rng.random() < 0.3:
                    edges.add((node, other))
        for source in (c, d):
            for node in cycle:
                if rng.random() < 0.15:
                    edges.add((source, node))
    return sorted(edges)


def _benchmark_shape_ok(pattern: SystemPattern, orientation: Orientation) -> bool:
    contractions = contraction_sets(pattern, orientation)
    partition = scc_partition(pattern)
    if len(contractions) != 1 or len(contractions[0].states) != 2:
        return False
    if len(partition.parent_ids()) != 2:
        return False
    classification = classify_sensors(pattern, orientation)
    return (
        classification.count(SensorType.ALPHA) == 1
        and classification.count(SensorType.BETA) == 2
        and structural_observability(pattern, orientation).observable
    )


def generate_benchmark_pattern(
    seed: int, n: int = 10, orientation: Orientation = Orientation.TRANSPOSED
) -> SystemPattern:
    """
    A system with one non-parent contraction pair and two parent SCCs.

    Four internal states: a and b both feed only d, so one of them is always
    unmatched; d and b form a cycle, c carries a self-loop, and d and c feed the
    two parent SCCs. Each parent SCC is a Hamiltonian cycle with random chords
    and self-loops. States are randomly relabelled and sensors placed minimally,
    giving m = 3 (one alpha, two beta).
    """
    if n < 8:
        raise ScenarioError(f"benchmark needs n >= 8 so both parent SCCs have two states, got {n}")
    rng = np.random.default_rng(seed)
    for attempt in range(BENCHMARK_ATTEMPTS):
        perm = rng.permutation(n)
        edges = [(int(perm[j]) + 1, int(perm[i]) + 1) for j, i in _benchmark_edges(rng, n)]
        bare = SystemPattern(n, edges)
        pattern = bare.with_sensors(minimal_sensor_placement(bare, orientation).to_sensors())
        if _benchmark_shape_ok(pattern, orientation):
            logger.debug(f"benchmark pattern accepted after {attempt + 1} draw(s)")
            return pattern
    raise ScenarioError(
        f"no benchmark pattern with the required shape in {BENCHMARK_ATTEMPTS} draws (seed {seed})"
    )


def build_benchmark_scenario(
    seed: int,
    failure: Optional[str] = None,
    recover: bool = False,
    failure_step: int = 30,
    recovery_step: Optional[int] = None,
    n: int = 10,
    orientation: Orientation = Orientation.TRANSPOSED,
    **settings: Any,
) -> Scenario:
    """
    The benchmark experiment: nominal run, optionally failing the alpha or the
    first beta sensor at ``failure_step`` and recovering it at ``recovery_step``
    (default: immediately).

    Parent SCC blocks are rescaled to rho, so every parent SCC carries an
    unstable mode and a beta failure diverges.
    """
    if failure not in (None, "alpha", "beta"):
        raise ScenarioError(f"failure must be 'alpha', 'beta' or None, got {failure!r}")
    pattern = generate_benchmark_pattern(seed, n, orientation)
    rho = settings.setdefault("target_rho", DEFAULT_RHO)
    partition = scc_partition(pattern)
    settings.setdefault("scc_radii", {cid: rho for cid in partition.parent_ids()})
    settings.setdefault("seed", seed)

    events: List[ScenarioEvent] = []
    expect: Dict[str, Verdict] = {NOMINAL_LABEL: Verdict.BOUNDED}
    name = "benchmark-nominal"
    if failure is not None:
        classification = classify_sensors(pattern, orientation)
        wanted = SensorType.ALPHA if failure == "alpha" else SensorType.BETA
        sid = classification.ids_of(wanted)[0]
        events.append(FailureEvent(sid, failure_step))
        failure_label = event_label(events[-1])
        name = f"benchmark-{failure}-failure"
        at = failure_step if recovery_step is None else recovery_step
        if recover:
            events.append(RecoveryEvent(sid, at))
            name += "-recovery"
        if recover and at == failure_step:
            expect[f"{failure_label}+{event_label(events[-1])}"] = Verdict.BOUNDED
        else:
            # an alpha failure only loses a stable mode at zero; no verdict is asserted
            if failure == "beta":
                expect[failure_label] = Verdict.DIVERGENT
            if recover:
                expect[event_label(events[-1])] = Verdict.BOUNDED
    settings.setdefault("name", name)
    return Scenario(pattern=pattern, events=events, expect=expect, **settings)
