"""Tests for contraction sets, SCCs, the observability verdict, placement and classification."""

from __future__ import annotations

import pytest

from struct_recovery.structure.analysis import (
    analyze,
    classify_sensors,
    minimal_sensor_placement,
    output_reachability,
    structural_observability,
)
from struct_recovery.structure.contraction import alternating_reach, contraction_sets
from struct_recovery.structure.digraph import build_bipartite
from struct_recovery.structure.matching import maximum_matching
from struct_recovery.structure.pattern import SystemPattern
from struct_recovery.structure.scc import scc_partition
from struct_recovery.type_defs import Orientation, SensorType


def _bare(pattern: SystemPattern) -> SystemPattern:
    return pattern.with_sensors({})


class TestContractionSets:
    def test_shared_target_pair(self, dilation_pattern):
        contractions = contraction_sets(dilation_pattern)

        assert len(contractions) == 1
        cset = contractions[0]
        assert cset.id == 1
        assert cset.states == frozenset({1, 2})
        assert cset.deficiency == 1
        assert cset.witness_unmatched in {1, 2}

    def test_chain_sink(self, chain):
        assert [c.sorted_states() for c in contraction_sets(chain)] == [[3]]

    def test_star_into_a_self_loop_needs_three_measurements(self):
        pattern = SystemPattern(4, [(1, 4), (2, 4), (3, 4), (4, 4)])
        contractions = contraction_sets(pattern)

        assert len(contractions) == 1
        assert contractions[0].states == frozenset({1, 2, 3, 4})
        assert contractions[0].deficiency == 3

    def test_no_edges_every_state_is_its_own_set(self):
        contractions = contraction_sets(SystemPattern(3))
        assert [c.sorted_states() for c in contractions] == [[1], [2], [3]]

    def test_alternating_reach_from_the_free_state(self, dilation_pattern):
        graph = build_bipartite(dilation_pattern)
        matching = maximum_matching(graph)
        free = next(iter(matching.unmatched_left))
        assert alternating_reach(graph, matching, free) == frozenset({1, 2})

    def test_perfect_matching_has_no_contractions(self):
        cycle = SystemPattern(3, [(1, 2), (2, 3), (3, 1)])
        assert contraction_sets(cycle) == []


class TestSCCPartition:
    def test_components_ids_and_parents(self, dilation_pattern):
        partition = scc_partition(dilation_pattern)

        assert partition.components == (frozenset({1}), frozenset({2, 3}), frozenset({4, 5}))
        assert partition.parent_ids() == [3]
        assert partition.component_of[5] == 3
        assert partition.condensation_edges == frozenset({(1, 2), (2, 3)})
        assert sorted(partition.condensation().edges()) == [(1, 2), (2, 3)]

    def test_isolated_states_are_parents(self):
        partition = scc_partition(SystemPattern(3))
        assert partition.parent_ids() == [1, 2, 3]

    def test_to_dict(self, chain):
        assert scc_partition(chain).to_dict()[-1] == {"id": 3, "states": [3], "parent": True}


class TestObservability:
    def test_observable_with_alpha_and_beta(self, dilation_pattern):
        verdict = structural_observability(dilation_pattern)
        assert verdict.observable
        assert bool(verdict)
        assert verdict.violations == ()

    def test_missing_alpha_measurement(self, dilation_pattern):
        verdict = structural_observability(dilation_pattern.without_sensor("a"))

        assert not verdict.observable
        assert [v.kind for v in verdict.violations] == ["contraction"]
        assert verdict.violations[0].states == (1, 2)
        assert verdict.violations[0].missing == 1

    def test_missing_parent_measurement(self, dilation_pattern):
        verdict = structural_observability(dilation_pattern.without_sensor("b"))

        assert not verdict.observable
        assert [v.kind for v in verdict.violations] == ["parent_scc"]
        assert verdict.violations[0].target_id == 3
        assert "parent SCC 3" in verdict.messages()[0]

    def test_measuring_both_contraction_members_with_one_sensor(self, dilation_pattern):
        pattern = dilation_pattern.with_sensors({"ab": [1, 2], "b": [4]})
        assert structural_observability(pattern).observable

    def test_output_reachability(self, dilation_pattern):
        assert output_reachability(dilation_pattern) == []
        assert output_reachability(dilation_pattern.without_sensor("b")) == [2, 3, 4, 5]


class TestPlacement:
    def test_dilation_pattern_needs_one_alpha_and_one_beta(self, dilation_pattern):
        placement = minimal_sensor_placement(_bare(dilation_pattern))

        assert placement.m == 2
        alpha, beta = placement.requirements
        assert alpha.type is SensorType.ALPHA and alpha.state in {1, 2}
        assert beta.type is SensorType.BETA and beta.state == 4 and beta.scc_id == 3
        placed = dilation_pattern.with_sensors(placement.to_sensors())
        assert placed.sensor_ids() == ["s1", "s2"]
        assert structural_observability(placed).observable

    def test_alpha_in_a_parent_scc_covers_it(self, chain):
        placement = minimal_sensor_placement(_bare(chain))
        assert [(r.state, r.type) for r in placement.requirements] == [(3, SensorType.ALPHA)]

    def test_orientation_changes_the_placement(self, chain):
        assert minimal_sensor_placement(_bare(chain), Orientation.TRANSPOSED).m == 1
        assert minimal_sensor_placement(_bare(chain), Orientation.PAPER).m == 2

    def test_deficiency_places_every_free_state(self):
        pattern = SystemPattern(4, [(1, 4), (2, 4), (3, 4), (4, 4)])
        placement = minimal_sensor_placement(pattern)

        assert placement.m == 3
        assert placement.count(SensorType.ALPHA) == 3
        assert structural_observability(pattern.with_sensors(placement.to_sensors())).observable


class TestClassification:
    def test_alpha_and_beta_roles(self, dilation_pattern):
        classification = classify_sensors(dilation_pattern)

        assert classification.type_of("a") is SensorType.ALPHA
        assert classification.type_of("b") is SensorType.BETA
        assert classification["a"].covered_contraction == 1
        assert classification["b"].covered_parent_scc == 3
        assert classification.ids_of(SensorType.ALPHA) == ["a"]

    def test_duplicate_coverage_is_redundant(self, dilation_pattern):
        classification = classify_sensors(dilation_pattern.with_sensor("c", [5]))
        assert classification.type_of("c") is SensorType.REDUNDANT
        assert classification.count(SensorType.REDUNDANT) == 1

    def test_alpha_in_parent_takes_the_parent_role(self, chain):
        role = classify_sensors(chain)["s1"]
        assert role.type is SensorType.ALPHA
        assert role.covered_parent_sccs == (3,)

    def test_violations_travel_with_the_classification(self, dilation_pattern):
        classification = classify_sensors(dilation_pattern.without_sensor("b"))
        assert [v.kind for v in classification.violations] == ["parent_scc"]


def test_analysis_report_aggregates_every_stage(dilation_pattern):
    report = analyze(dilation_pattern)
    data = report.to_dict()

    assert data["n"] == 5
    assert data["orientation"] == "transposed"
    assert data["matching"]["size"] == 4
    assert len(data["contractions"]) == 1
    assert [c["parent"] for c in data["sccs"]] == [False, False, True]
    assert data["placement"]["m"] == 2
    assert data["verdict"] == {"observable": True, "violations": []}
    assert set(report.timings) >= {"matching", "contractions", "scc", "verdict"}
    assert all(t >= 0 for t in report.timings.values())


@pytest.mark.parametrize("orientation", list(Orientation))
def test_empty_edge_list_report(orientation):
    report = analyze(SystemPattern(3), orientation)

    assert len(report.contractions) == 3
    assert report.partition.parent_ids() == [1, 2, 3]
    assert report.placement.m == 3
    assert not report.verdict.observable
