#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
System digraph, its bipartite companion, and matchings over it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Tuple

import networkx as nx

from ..errors import PatternValidationError
from ..type_defs import Orientation
from .pattern import SystemPattern

Link = Tuple[int, int]  # (left v+, right v-), 1-based


@dataclass(frozen=True)
class Digraph:
    """Forward and reverse adjacency over states 1..n, each list sorted."""

    n: int
    forward: Dict[int, Tuple[int, ...]]
    reverse: Dict[int, Tuple[int, ...]]

    def successors(self, state: int) -> Tuple[int, ...]:
        return self.forward[state]

    def predecessors(self, state: int) -> Tuple[int, ...]:
        return self.reverse[state]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from((j, i) for j, targets in self.forward.items() for i in targets)
        return graph


def build_digraph(pattern: SystemPattern) -> Digraph:
    forward: Dict[int, List[int]] = {s: [] for s in pattern.states}
    reverse: Dict[int, List[int]] = {s: [] for s in pattern.states}
    for j, i in pattern.sorted_edges():
        if not (1 <= j <= pattern.n and 1 <= i <= pattern.n):
            raise PatternValidationError(f"edge ({j}, {i}) out of range", offending=(j, i))
        forward[j].append(i)
        reverse[i].append(j)
    return Digraph(
        n=pattern.n,
        forward={s: tuple(sorted(v)) for s, v in forward.items()},
        reverse={s: tuple(sorted(v)) for s, v in reverse.items()},
    )


@dataclass(frozen=True)
class BipartiteGraph:
    """Gamma_A: left and right copies of the states joined by one link per edge."""

    n: int
    links: FrozenSet[Link]
    orientation: Orientation = Orientation.TRANSPOSED

    @property
    def left(self) -> range:
        return range(1, self.n + 1)

    @property
    def right(self) -> range:
        return range(1, self.n + 1)

    def adjacency(self) -> List[List[int]]:
        """0-based sorted right neighbours of every left node."""
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for left, right in self.links:
            adj[left - 1].append(right - 1)
        for row in adj:
            row.sort()
        return adj


def build_bipartite(
    pattern: SystemPattern, orientation: Orientation = Orientation.TRANSPOSED
) -> BipartiteGraph:
    """Edge (j, i) becomes link (j+, i-) when transposed and (i+, j-) under paper orientation."""
    if orientation is Orientation.TRANSPOSED:
        links = frozenset((j, i) for j, i in pattern.edges)
    else:
        links = frozenset((i, j) for j, i in pattern.edges)
    return BipartiteGraph(n=pattern.n, links=links, orientation=orientation)


@dataclass(frozen=True)
class Matching:
    n: int
    pairs: FrozenSet[Link] = field(default_factory=frozenset)

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def matched_left(self) -> FrozenSet[int]:
        return frozenset(left for left, _ in self.pairs)

    @property
    def matched_right(self) -> FrozenSet[int]:
        return frozenset(right for _, right in self.pairs)

    @property
    def unmatched_left(self) -> FrozenSet[int]:
        return frozenset(range(1, self.n + 1)) - self.matched_left

    def sorted_pairs(self) -> List[Link]:
        return sorted(self.pairs)

    def right_of(self) -> Dict[int, int]:
        return dict(self.pairs)


def validate_matching(graph: BipartiteGraph, pairs: Iterable[Link]) -> Matching:
    """Check that ``pairs`` are links of ``graph`` sharing no endpoint."""
    seen_left: set = set()
    seen_right: set = set()
    checked = set()
    for pair in pairs:
        left, right = int(pair[0]), int(pair[1])
        if (left, right) not in graph.links:
            raise PatternValidationError(f"({left}+, {right}-) is not a link", offending=(left, right))
        if left in seen_left:
            raise PatternValidationError(f"left node {left}+ matched twice", offending=(left, right))
        if right in seen_right:
            raise PatternValidationError(f"right node {right}- matched twice", offending=(left, right))
        seen_left.add(left)
        seen_right.add(right)
        checked.add((left, right))
    return Matching(n=graph.n, pairs=frozenset(checked))
