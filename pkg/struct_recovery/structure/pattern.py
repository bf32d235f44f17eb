#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
SystemPattern - the zero/nonzero structure of (A, H).

An edge ``(j, i)`` means ``a_ij != 0``, i.e. a link ``x_j -> x_i``. Sensors map
a string id to the set of states they measure. All indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Tuple

from ..errors import PatternValidationError

Edge = Tuple[int, int]


def _as_edge(raw: Any) -> Edge:
    try:
        j, i = raw
        return int(j), int(i)
    except (TypeError, ValueError):
        raise PatternValidationError(f"edge {raw!r} is not a (j, i) pair", offending=raw)


@dataclass(frozen=True)
class SystemPattern:
    """Structural ground truth for one system. Immutable after construction."""

    n: int
    edges: FrozenSet[Edge] = field(default_factory=frozenset)
    measurement_entries: Mapping[str, FrozenSet[int]] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise PatternValidationError(f"n must be a positive integer, got {self.n!r}", offending=self.n)

        raw_edges = list(self.edges)
        edges = [_as_edge(e) for e in raw_edges]
        seen = set()
        for edge in edges:
            j, i = edge
            if not (1 <= j <= self.n and 1 <= i <= self.n):
                raise PatternValidationError(
                    f"edge ({j}, {i}) has an index outside [1, {self.n}]", offending=edge
                )
            if edge in seen:
                raise PatternValidationError(f"duplicate edge ({j}, {i})", offending=edge)
            seen.add(edge)

        sensors: Dict[str, FrozenSet[int]] = {}
        for sensor_id, states in dict(self.measurement_entries).items():
            key = str(sensor_id)
            if key in sensors:
                raise PatternValidationError(f"duplicate sensor id {key!r}", offending=key)
            state_set = frozenset(int(s) for s in states)
            if not state_set:
                raise PatternValidationError(f"sensor {key!r} measures no state", offending=key)
            for s in state_set:
                if not 1 <= s <= self.n:
                    raise PatternValidationError(
                        f"sensor {key!r} measures state {s} outside [1, {self.n}]",
                        offending=(key, s),
                    )
            sensors[key] = state_set

        object.__setattr__(self, "edges", frozenset(seen))
        object.__setattr__(self, "measurement_entries", sensors)

    # ---- convenience views ----
    @property
    def states(self) -> range:
        return range(1, self.n + 1)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def sensor_ids(self) -> List[str]:
        return sorted(self.measurement_entries)

    def measured_states(self) -> FrozenSet[int]:
        measured: set = set()
        for states in self.measurement_entries.values():
            measured.update(states)
        return frozenset(measured)

    def sensor_states(self, sensor_id: str) -> FrozenSet[int]:
        try:
            return self.measurement_entries[sensor_id]
        except KeyError:
            raise PatternValidationError(f"unknown sensor {sensor_id!r}", offending=sensor_id)

    def measurement_pairs(self) -> List[Tuple[str, int]]:
        """Every (sensor, state) pair, in canonical order."""
        return [(sid, s) for sid in self.sensor_ids() for s in sorted(self.measurement_entries[sid])]

    # ---- functional updates ----
    def with_sensor(self, sensor_id: str, states: Iterable[int]) -> "SystemPattern":
        if sensor_id in self.measurement_entries:
            raise PatternValidationError(f"sensor {sensor_id!r} already exists", offending=sensor_id)
        sensors = dict(self.measurement_entries)
        sensors[sensor_id] = frozenset(states)
        return SystemPattern(self.n, self.edges, sensors)

    def without_sensor(self, sensor_id: str) -> "SystemPattern":
        self.sensor_states(sensor_id)
        sensors = {k: v for k, v in self.measurement_entries.items() if k != sensor_id}
        return SystemPattern(self.n, self.edges, sensors)

    def with_sensors(self, sensors: Mapping[str, Iterable[int]]) -> "SystemPattern":
        """Replace the whole sensor map."""
        return SystemPattern(self.n, self.edges, {k: frozenset(v) for k, v in sensors.items()})

    # ---- serialization ----
    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "edges": [[j, i] for j, i in self.sorted_edges()],
            "sensors": [
                {"id": sid, "states": sorted(self.measurement_entries[sid])}
                for sid in self.sensor_ids()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SystemPattern":
        sensors: Dict[str, List[int]] = {}
        for entry in data.get("sensors", []):
            key = str(entry["id"])
            if key in sensors:
                raise PatternValidationError(f"duplicate sensor id {key!r}", offending=key)
            sensors[key] = list(entry["states"])
        # a list keeps duplicates visible to validation
        return cls(int(data["n"]), [tuple(e) for e in data.get("edges", [])], sensors)  # type: ignore[arg-type]
