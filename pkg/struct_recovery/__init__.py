#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
struct-recovery

Structural observability analysis of linear systems, minimal sensor
placement, alpha/beta sensor classification, recovery planning after sensor
failures, and a Monte Carlo harness for the distributed estimator.
"""

import importlib
import sys

__version__ = "0.1.0"
__all__ = [
    "SystemPattern",
    "analyze",
    "structural_observability",
    "minimal_sensor_placement",
    "classify_sensors",
    "plan_recovery",
    "run",
]

_LAZY = {
    "SystemPattern": ".structure.pattern",
    "analyze": ".structure.analysis",
    "structural_observability": ".structure.analysis",
    "minimal_sensor_placement": ".structure.analysis",
    "classify_sensors": ".structure.analysis",
    "plan_recovery": ".recovery.planner",
    "run": ".sim.harness",
}


def __getattr__(name):
    """Lazy import so that ``import struct_recovery`` stays cheap."""
    module_name = _LAZY.get(name)
    if module_name is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    value = getattr(importlib.import_module(module_name, __name__), name)
    # Cache in module namespace to prevent repeated __getattr__ calls
    sys.modules[__name__].__dict__[name] = value
    return value
