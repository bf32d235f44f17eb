"""
Type definitions for struct_recovery
Shared enums to avoid circular imports
"""

from enum import Enum


class Orientation(Enum):
    """Endpoint convention for the bipartite companion of the system digraph."""

    PAPER = "paper"  # edge (j, i) -> left i
    TRANSPOSED = "transposed"  # edge (j, i) -> left j


class SensorType(Enum):
    ALPHA = "alpha"
    BETA = "beta"
    REDUNDANT = "redundant"


class Connectivity(Enum):
    HUB = "hub"
    STRONGLY_CONNECTED = "strongly_connected"


class Verdict(Enum):
    BOUNDED = "bounded"
    DIVERGENT = "divergent"


class EventKind(Enum):
    FAILURE = "failure"
    RECOVERY = "recovery"
