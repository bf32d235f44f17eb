#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Strongly connected components and parent flags."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

import networkx as nx

from .digraph import build_digraph
from .pattern import SystemPattern

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SCCPartition:
    """Components sorted by smallest member; ids are 1-based positions."""

    components: Tuple[FrozenSet[int], ...]
    parent_flags: Tuple[bool, ...]
    component_of: Dict[int, int]
    condensation_edges: FrozenSet[Tuple[int, int]]

    def component(self, component_id: int) -> FrozenSet[int]:
        return self.components[component_id - 1]

    def is_parent(self, component_id: int) -> bool:
        return self.parent_flags[component_id - 1]

    def parent_ids(self) -> List[int]:
        return [idx for idx, flag in enumerate(self.parent_flags, start=1) if flag]

    def condensation(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, len(self.components) + 1))
        graph.add_edges_from(self.condensation_edges)
        return graph

    def to_dict(self) -> List[Dict]:
        return [
            {"id": idx, "states": sorted(comp), "parent": flag}
            for idx, (comp, flag) in enumerate(zip(self.components, self.parent_flags), start=1)
        ]


def scc_partition(pattern: SystemPattern) -> SCCPartition:
    graph = build_digraph(pattern).to_networkx()
    components = sorted((frozenset(c) for c in nx.strongly_connected_components(graph)), key=min)

    # condensation numbers its nodes in the order of the given components
    dag = nx.condensation(graph, scc=components)
    component_of = {state: cid + 1 for state, cid in dag.graph["mapping"].items()}
    parent_flags = tuple(dag.out_degree(cid) == 0 for cid in range(len(components)))
    edges = frozenset((u + 1, v + 1) for u, v in dag.edges())

    logger.debug(
        f"SCC partition: {len(components)} components, {sum(parent_flags)} parent"
    )
    return SCCPartition(
        components=tuple(components),
        parent_flags=parent_flags,
        component_of=component_of,
        condensation_edges=edges,
    )
