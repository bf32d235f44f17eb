#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Structural observability analysis.

A pattern is structurally observable iff

* the states can be matched into ``states + measurements`` (every contraction
  set has as many measured members as unmatched ones), and
* every parent SCC holds a measured state.

The first condition is decided with a matching over an augmented right side
that adds one node per (sensor, state) pair, warm-started from the canonical
matching. Only unmatched states ever become left roots, so the leftover free
states are exactly the uncovered deficiency of their contraction sets.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..type_defs import Orientation, SensorType
from .contraction import ContractionSet, contraction_sets
from .digraph import Matching, build_bipartite, build_digraph
from .matching import AugmentingPathMatcher, maximum_matching
from .pattern import SystemPattern
from .scc import SCCPartition, scc_partition

logger = logging.getLogger(__name__)


# ============ Result types ============
@dataclass(frozen=True)
class Violation:
    kind: str  # "contraction" or "parent_scc"
    target_id: int
    states: Tuple[int, ...]
    missing: int = 1

    @property
    def message(self) -> str:
        if self.kind == "contraction":
            return (
                f"contraction set C{self.target_id} {list(self.states)} needs "
                f"{self.missing} more measured state(s)"
            )
        return f"parent SCC {self.target_id} {list(self.states)} has no measured state"

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "target_id": self.target_id,
            "states": list(self.states),
            "missing": self.missing,
            "message": self.message,
        }


@dataclass(frozen=True)
class ObservabilityVerdict:
    observable: bool
    violations: Tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.observable

    def messages(self) -> List[str]:
        return [v.message for v in self.violations]


@dataclass(frozen=True)
class PlacementRequirement:
    state: int
    type: SensorType
    contraction_id: Optional[int] = None
    scc_id: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            "state": self.state,
            "type": self.type.value,
            "contraction_id": self.contraction_id,
            "scc_id": self.scc_id,
        }


@dataclass(frozen=True)
class SensorPlacement:
    requirements: Tuple[PlacementRequirement, ...]

    @property
    def m(self) -> int:
        return len(self.requirements)

    def count(self, sensor_type: SensorType) -> int:
        return sum(1 for r in self.requirements if r.type is sensor_type)

    def to_sensors(self, prefix: str = "s") -> Dict[str, List[int]]:
        return {f"{prefix}{k}": [req.state] for k, req in enumerate(self.requirements, start=1)}

    def to_dict(self) -> Dict:
        return {"m": self.m, "requirements": [r.to_dict() for r in self.requirements]}


@dataclass(frozen=True)
class SensorRole:
    sensor_id: str
    type: SensorType
    states: Tuple[int, ...]
    covered_contractions: Tuple[int, ...] = ()
    covered_parent_sccs: Tuple[int, ...] = ()

    @property
    def covered_contraction(self) -> Optional[int]:
        return self.covered_contractions[0] if self.covered_contractions else None

    @property
    def covered_parent_scc(self) -> Optional[int]:
        return self.covered_parent_sccs[0] if self.covered_parent_sccs else None

    def to_dict(self) -> Dict:
        return {
            "id": self.sensor_id,
            "type": self.type.value,
            "states": list(self.states),
            "covered_contraction": self.covered_contraction,
            "covered_contractions": list(self.covered_contractions),
            "covered_parent_scc": self.covered_parent_scc,
            "covered_parent_sccs": list(self.covered_parent_sccs),
        }


@dataclass(frozen=True)
class SensorClassification:
    roles: Dict[str, SensorRole]
    violations: Tuple[Violation, ...] = ()

    def __getitem__(self, sensor_id: str) -> SensorRole:
        return self.roles[sensor_id]

    def type_of(self, sensor_id: str) -> SensorType:
        return self.roles[sensor_id].type

    def ids_of(self, sensor_type: SensorType) -> List[str]:
        return sorted(sid for sid, role in self.roles.items() if role.type is sensor_type)

    def sensor_ids(self) -> List[str]:
        return sorted(self.roles)

    def count(self, sensor_type: SensorType) -> int:
        return len(self.ids_of(sensor_type))

    def to_dict(self) -> Dict:
        return {
            "sensors": [self.roles[sid].to_dict() for sid in self.sensor_ids()],
            "violations": [v.to_dict() for v in self.violations],
        }


# ============ Core operations ============
def canonical_matching(
    pattern: SystemPattern, orientation: Orientation = Orientation.TRANSPOSED
) -> Matching:
    return maximum_matching(build_bipartite(pattern, orientation))


def _uncovered_states(
    pattern: SystemPattern, orientation: Orientation, matching: Matching
) -> List[int]:
    """States left unmatched once every measurement adds its own right node."""
    graph = build_bipartite(pattern, orientation)
    adj = graph.adjacency()
    num_right = pattern.n
    for _sensor, state in pattern.measurement_pairs():
        adj[state - 1].append(num_right)
        num_right += 1
    matcher = AugmentingPathMatcher(adj, num_right)
    matcher.seed((left - 1, right - 1) for left, right in matching.pairs)
    matcher.run()
    return [u + 1 for u, r in enumerate(matcher.match_left) if r == -1]


def _observability(
    pattern: SystemPattern,
    orientation: Orientation,
    matching: Matching,
    contractions: List[ContractionSet],
    partition: SCCPartition,
) -> ObservabilityVerdict:
    violations: List[Violation] = []

    uncovered = set(_uncovered_states(pattern, orientation, matching))
    for cset in contractions:
        missing = len(uncovered & cset.states)
        if missing:
            violations.append(
                Violation("contraction", cset.id, tuple(cset.sorted_states()), missing)
            )

    measured = pattern.measured_states()
    for cid in partition.parent_ids():
        comp = partition.component(cid)
        if not comp & measured:
            violations.append(Violation("parent_scc", cid, tuple(sorted(comp))))

    return ObservabilityVerdict(observable=not violations, violations=tuple(violations))


def structural_observability(
    pattern: SystemPattern, orientation: Orientation = Orientation.TRANSPOSED
) -> ObservabilityVerdict:
    matching = canonical_matching(pattern, orientation)
    contractions = contraction_sets(pattern, orientation, matching)
    return _observability(pattern, orientation, matching, contractions, scc_partition(pattern))


def output_reachability(pattern: SystemPattern) -> List[int]:
    """States with no directed path to any measured state."""
    digraph = build_digraph(pattern)
    reached = set(pattern.measured_states())
    queue = deque(sorted(reached))
    while queue:
        s = queue.popleft()
        for pred in digraph.predecessors(s):
            if pred not in reached:
                reached.add(pred)
                queue.append(pred)
    return [s for s in pattern.states if s not in reached]


def _placement(
    contractions: List[ContractionSet], partition: SCCPartition
) -> SensorPlacement:
    requirements: List[PlacementRequirement] = []
    parent_ids = partition.parent_ids()
    parent_members = {cid: partition.component(cid) for cid in parent_ids}

    for cset in contractions:
        if cset.deficiency == 1:
            # any member works; prefer one that also covers a parent SCC
            in_parent = sorted(
                s for s in cset.states if partition.component_of[s] in parent_members
            )
            chosen = [in_parent[0] if in_parent else cset.witness_unmatched]
        else:
            chosen = list(cset.free_states)
        for state in chosen:
            requirements.append(
                PlacementRequirement(state, SensorType.ALPHA, contraction_id=cset.id)
            )

    alpha_states = {r.state for r in requirements}
    for cid in parent_ids:
        comp = parent_members[cid]
        if comp & alpha_states:
            continue
        requirements.append(PlacementRequirement(min(comp), SensorType.BETA, scc_id=cid))
    return SensorPlacement(tuple(requirements))


def minimal_sensor_placement(
    pattern: SystemPattern, orientation: Orientation = Orientation.TRANSPOSED
) -> SensorPlacement:
    """One alpha requirement per unmatched slot of each contraction set, one beta per uncovered parent SCC."""
    matching = canonical_matching(pattern, orientation)
    contractions = contraction_sets(pattern, orientation, matching)
    placement = _placement(contractions, scc_partition(pattern))
    logger.info(
        f"placement: m={placement.m} "
        f"({placement.count(SensorType.ALPHA)} alpha, {placement.count(SensorType.BETA)} beta)"
    )
    return placement


def _classify(
    pattern: SystemPattern,
    contractions: List[ContractionSet],
    partition: SCCPartition,
    verdict: ObservabilityVerdict,
) -> SensorClassification:
    contraction_of: Dict[int, int] = {}
    for cset in contractions:
        for s in cset.states:
            contraction_of[s] = cset.id

    covered_sets: Dict[str, Tuple[int, ...]] = {}
    for sid in pattern.sensor_ids():
        states = pattern.measurement_entries[sid]
        covered_sets[sid] = tuple(sorted({contraction_of[s] for s in states if s in contraction_of}))
    is_alpha = {sid: bool(ids) for sid, ids in covered_sets.items()}

    # designated coverer per parent SCC: first alpha sensor measuring it, else first sensor
    designated: Dict[str, List[int]] = {sid: [] for sid in pattern.sensor_ids()}
    for cid in partition.parent_ids():
        comp = partition.component(cid)
        measuring = [
            sid for sid in pattern.sensor_ids() if pattern.measurement_entries[sid] & comp
        ]
        if not measuring:
            continue
        alphas = [sid for sid in measuring if is_alpha[sid]]
        chosen = alphas[0] if alphas else measuring[0]
        designated[chosen].append(cid)

    roles: Dict[str, SensorRole] = {}
    for sid in pattern.sensor_ids():
        if is_alpha[sid]:
            sensor_type = SensorType.ALPHA
        elif designated[sid]:
            sensor_type = SensorType.BETA
        else:
            sensor_type = SensorType.REDUNDANT
        roles[sid] = SensorRole(
            sensor_id=sid,
            type=sensor_type,
            states=tuple(sorted(pattern.measurement_entries[sid])),
            covered_contractions=covered_sets[sid],
            covered_parent_sccs=tuple(designated[sid]),
        )
    return SensorClassification(roles=roles, violations=verdict.violations)


def classify_sensors(
    pattern: SystemPattern, orientation: Orientation = Orientation.TRANSPOSED
) -> SensorClassification:
    matching = canonical_matching(pattern, orientation)
    contractions = contraction_sets(pattern, orientation, matching)
    partition = scc_partition(pattern)
    verdict = _observability(pattern, orientation, matching, contractions, partition)
    return _classify(pattern, contractions, partition, verdict)


# ============ Aggregate report ============
@dataclass
class AnalysisReport:
    pattern: SystemPattern
    orientation: Orientation
    matching: Matching
    contractions: List[ContractionSet]
    partition: SCCPartition
    placement: SensorPlacement
    classification: SensorClassification
    verdict: ObservabilityVerdict
    unreachable: List[int]
    timings: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "n": self.pattern.n,
            "orientation": self.orientation.value,
            "matching": {
                "size": self.matching.size,
                "pairs": [list(p) for p in self.matching.sorted_pairs()],
                "unmatched": sorted(self.matching.unmatched_left),
            },
            "contractions": [c.to_dict() for c in self.contractions],
            "sccs": self.partition.to_dict(),
            "placement": self.placement.to_dict(),
            "classification": self.classification.to_dict(),
            "unreachable": list(self.unreachable),
            "verdict": {
                "observable": self.verdict.observable,
                "violations": [v.to_dict() for v in self.verdict.violations],
            },
        }


def analyze(
    pattern: SystemPattern, orientation: Orientation = Orientation.TRANSPOSED
) -> AnalysisReport:
    timings: Dict[str, float] = {}

    def timed(stage: str, func, *args):
        started = time.perf_counter()
        value = func(*args)
        timings[stage] = time.perf_counter() - started
        return value

    matching = timed("matching", canonical_matching, pattern, orientation)
    contractions = timed("contractions", contraction_sets, pattern, orientation, matching)
    partition = timed("scc", scc_partition, pattern)
    verdict = timed("verdict", _observability, pattern, orientation, matching, contractions, partition)
    classification = timed("classification", _classify, pattern, contractions, partition, verdict)
    placement = timed("placement", _placement, contractions, partition)
    unreachable = timed("reachability", output_reachability, pattern)

    logger.info(
        f"analysis: |M|={matching.size} |dM|={len(matching.unmatched_left)} "
        f"contractions={len(contractions)} parent SCCs={len(partition.parent_ids())} "
        f"observable={verdict.observable}"
    )
    return AnalysisReport(
        pattern=pattern,
        orientation=orientation,
        matching=matching,
        contractions=contractions,
        partition=partition,
        placement=placement,
        classification=classification,
        verdict=verdict,
        unreachable=unreachable,
        timings=timings,
    )
