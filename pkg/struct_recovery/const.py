#!/usr/bin/env python
# -*- coding: utf-8 -*-

from pathlib import Path

# Define the root directory of the struct-recovery project
STRUCT_RECOVERY_ROOT = Path(__file__).parent.parent

# Defaults shared by the CLI, the config layer and the harness
DEFAULT_SEED = 1729
DEFAULT_RHO = 1.1
DEFAULT_NOISE = 0.25
DEFAULT_TRIALS = 100
DEFAULT_HORIZON = 100
DEFAULT_GAIN_MARGIN = 0.02
DEFAULT_GAIN_BUDGET = 5000

# Numeric guards
MAX_DISTRIBUTED_DIM = 400
ROW_SUM_TOLERANCE = 1e-12
RHO_TOLERANCE = 1e-6

# Divergence detector
DIVERGENCE_WINDOW = 10
DIVERGENCE_GROWTH = 1e3
DIVERGENCE_CEILING = 1e12

# Rank decisions on normalized matrices: threshold = max(dim, floor) * eps
RANK_TOLERANCE_FLOOR = 64
PBH_CLUSTER_TOLERANCE = 1e-8

# Gain search stops early once the closed-loop rho drops below this
GAIN_GOOD_ENOUGH = 0.5
