"""Structural layer: system patterns, matchings, contractions, SCCs and the observability verdict."""

from .analysis import (
    AnalysisReport,
    ObservabilityVerdict,
    PlacementRequirement,
    SensorClassification,
    SensorPlacement,
    SensorRole,
    Violation,
    analyze,
    canonical_matching,
    classify_sensors,
    minimal_sensor_placement,
    output_reachability,
    structural_observability,
)
from .contraction import ContractionSet, contraction_sets
from .digraph import (
    BipartiteGraph,
    Digraph,
    Matching,
    build_bipartite,
    build_digraph,
    validate_matching,
)
from .matching import maximum_matching
from .pattern import SystemPattern
from .scc import SCCPartition, scc_partition
from .system_file import load_system, parse_system, save_system, serialize_system

__all__ = [
    "AnalysisReport",
    "BipartiteGraph",
    "ContractionSet",
    "Digraph",
    "Matching",
    "ObservabilityVerdict",
    "PlacementRequirement",
    "SCCPartition",
    "SensorClassification",
    "SensorPlacement",
    "SensorRole",
    "SystemPattern",
    "Violation",
    "analyze",
    "build_bipartite",
    "build_digraph",
    "canonical_matching",
    "classify_sensors",
    "contraction_sets",
    "load_system",
    "maximum_matching",
    "minimal_sensor_placement",
    "output_reachability",
    "parse_system",
    "save_system",
    "scc_partition",
    "serialize_system",
    "structural_observability",
    "validate_matching",
]
