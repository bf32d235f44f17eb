#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Maximum bipartite matching by repeated augmenting paths.

Free left nodes are processed in ascending order and every adjacency list is
scanned in ascending order, so the result (the canonical matching) is a pure
function of the graph. The depth-first search is iterative: a recursive search
hits the interpreter limit on long alternating paths.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from .digraph import BipartiteGraph, Link, Matching, validate_matching

logger = logging.getLogger(__name__)

__all__ = ["AugmentingPathMatcher", "maximum_matching"]


class AugmentingPathMatcher:
    """
    Matching state over 0-based integer adjacency lists.

    ``match_left[u]`` is the right partner of left node ``u`` (-1 when free) and
    ``match_right[r]`` the left partner of right node ``r``.
    """

    def __init__(self, adj: Sequence[Sequence[int]], num_right: int):
        self.adj = adj
        self.num_left = len(adj)
        self.num_right = num_right
        self.match_left: List[int] = [-1] * self.num_left
        self.match_right: List[int] = [-1] * num_right
        self.augmentations = 0
        self._visited: List[int] = [0] * self.num_left
        self._stamp = 1

    def seed(self, pairs: Iterable[Tuple[int, int]]) -> None:
        """Warm start from an existing (valid) matching."""
        for u, r in pairs:
            self.match_left[u] = r
            self.match_right[r] = u

    def _augment_from(self, root: int) -> bool:
        adj = self.adj
        match_left = self.match_left
        match_right = self.match_right
        visited = self._visited
        stamp = self._stamp

        visited[root] = stamp
        stack: List[List[int]] = [[root, 0]]
        path_rights: List[int] = []
        while stack:
            frame = stack[-1]
            u, idx = frame
            neighbours = adj[u]
            if idx == len(neighbours):
                stack.pop()
                if path_rights:
                    path_rights.pop()
                continue
            frame[1] = idx + 1
            r = neighbours[idx]
            w = match_right[r]
            if w == -1:
                path_rights.append(r)
                # M = M xor P
                for (left, _), right in zip(stack, path_rights):
                    match_left[left] = right
                    match_right[right] = left
                self.augmentations += 1
                return True
            if visited[w] != stamp:
                visited[w] = stamp
                path_rights.append(r)
                stack.append([w, 0])
        return False

    def run(self) -> int:
        """Augment from every free left node in ascending order; returns the size."""
        for root in range(self.num_left):
            if self.match_left[root] != -1:
                continue
            if self._augment_from(root):
                # A failed search leaves the matching unchanged, so its visited
                # nodes stay dead until the next augmentation.
                self._stamp += 1
        return self.size

    @property
    def size(self) -> int:
        return sum(1 for r in self.match_left if r != -1)

    def pairs(self) -> List[Tuple[int, int]]:
        return [(u, r) for u, r in enumerate(self.match_left) if r != -1]


def maximum_matching(graph: BipartiteGraph, initial: Optional[Iterable[Link]] = None) -> Matching:
    """Canonical maximum matching of ``graph``; ``initial`` optionally warm-starts it."""
    matcher = AugmentingPathMatcher(graph.adjacency(), graph.n)
    if initial is not None:
        start = validate_matching(graph, initial)
        matcher.seed((left - 1, right - 1) for left, right in start.pairs)
    matcher.run()
    pairs = frozenset((u + 1, r + 1) for u, r in matcher.pairs())
    logger.debug(f"maximum matching: |M|={len(pairs)} after {matcher.augmentations} augmentations")
    return Matching(n=graph.n, pairs=pairs)
