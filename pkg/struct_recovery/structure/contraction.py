#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Contraction detection.

Starting from every unmatched left node of the canonical maximum matching, walk
alternating paths in the auxiliary graph (matched links reversed): from a left
node ``u`` follow any link to a right node ``r``, then the matched link of ``r``
back to its left partner. Every left node reached this way is unmatched under
some maximum matching. Reach sets that overlap are merged.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..type_defs import Orientation
from .digraph import BipartiteGraph, Matching, build_bipartite
from .matching import maximum_matching
from .pattern import SystemPattern

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContractionSet:
    id: int
    states: FrozenSet[int]
    witness_unmatched: int
    free_states: Tuple[int, ...]

    @property
    def deficiency(self) -> int:
        """How many members must be measured at once."""
        return len(self.free_states)

    def sorted_states(self) -> List[int]:
        return sorted(self.states)

    def to_dict(self) -> Dict:
        return {
            "id": self.id,
            "states": self.sorted_states(),
            "witness_unmatched": self.witness_unmatched,
            "free_states": list(self.free_states),
            "deficiency": self.deficiency,
        }


def alternating_reach(graph: BipartiteGraph, matching: Matching, start: int) -> FrozenSet[int]:
    """Left nodes reachable from ``start`` by alternating paths (1-based)."""
    adj = graph.adjacency()
    partner_of_right = {r - 1: left - 1 for left, r in matching.pairs}
    return _reach(adj, partner_of_right, start - 1)


def _reach(adj: List[List[int]], partner_of_right: Dict[int, int], root: int) -> FrozenSet[int]:
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for r in adj[u]:
            w = partner_of_right.get(r)
            if w is not None and w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(s + 1 for s in seen)


def _find(parent: List[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def contraction_sets(
    pattern: SystemPattern,
    orientation: Orientation = Orientation.TRANSPOSED,
    matching: Optional[Matching] = None,
) -> List[ContractionSet]:
    """Contraction sets, ids 1..k ordered by their smallest member."""
    graph = build_bipartite(pattern, orientation)
    if matching is None:
        matching = maximum_matching(graph)
    free = sorted(matching.unmatched_left)
    if not free:
        return []

    adj = graph.adjacency()
    partner_of_right = {r - 1: left - 1 for left, r in matching.pairs}

    # union-find over states; members of one reach set are unioned with its root
    parent = list(range(pattern.n + 1))
    covered = set()
    for f in free:
        reach = _reach(adj, partner_of_right, f - 1)
        for s in reach:
            covered.add(s)
            ra, rb = _find(parent, f), _find(parent, s)
            if ra != rb:
                parent[rb] = ra

    groups: Dict[int, set] = {}
    for s in covered:
        groups.setdefault(_find(parent, s), set()).add(s)

    free_set = set(free)
    ordered = sorted(groups.values(), key=min)
    result = []
    for idx, members in enumerate(ordered, start=1):
        free_members = tuple(sorted(free_set & members))
        result.append(
            ContractionSet(
                id=idx,
                states=frozenset(members),
                witness_unmatched=free_members[0],
                free_states=free_members,
            )
        )
    logger.debug(
        f"contraction sets: {len(result)} from {len(free)} unmatched states "
        f"({orientation.value} orientation)"
    )
    return result
