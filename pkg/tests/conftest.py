"""Shared patterns for the struct-recovery tests."""

from __future__ import annotations

import pytest

from struct_recovery.structure.pattern import SystemPattern


@pytest.fixture(autouse=True)
def _runtime_root(tmp_path, monkeypatch):
    """Keep log files and config out of the home directory."""
    monkeypatch.setenv("STRUCT_RECOVERY_ROOT", str(tmp_path / "runtime"))
    monkeypatch.setenv("STRUCT_RECOVERY_ENV", "test")


@pytest.fixture
def chain() -> SystemPattern:
    """1 -> 2 -> 3, measured at the end of the chain."""
    return SystemPattern(3, [(1, 2), (2, 3)], {"s1": [3]})


@pytest.fixture
def dilation_pattern() -> SystemPattern:
    """
    States 1 and 2 both feed only state 3; 2 and 3 form a cycle; 3 feeds the
    parent cycle {4, 5}. Contraction set {1, 2}, parent SCC {4, 5} (id 3).
    """
    edges = [(1, 3), (2, 3), (3, 2), (3, 4), (4, 5), (5, 4)]
    return SystemPattern(5, edges, {"a": [1], "b": [4]})


@pytest.fixture
def self_loop_parent() -> SystemPattern:
    """Same dilation, but the parent SCC is the single self-loop {4}."""
    edges = [(1, 3), (2, 3), (3, 2), (3, 4), (4, 4)]
    return SystemPattern(4, edges, {"a": [1], "b": [4]})
