#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Output Adapters - terminal rendering kept apart from the analysis code.
"""

from .output_adapter import OutputAdapter
from .rich_adapter import RichOutputAdapter

__all__ = [
    "OutputAdapter",
    "RichOutputAdapter",
]
