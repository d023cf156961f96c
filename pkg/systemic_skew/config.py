# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew configuration."""

import os


def _float_pair(value):
    low, high = value.replace(",", " ").split()
    return float(low), float(high)


DEFAULT_SIGMA0 = float(os.getenv("SYSTEMIC_SKEW_SIGMA0", 0.18))
"""Vol scale of the jump-size scaling rule (held fixed during calibration)."""

POISSON_TAIL_TOLERANCE = float(os.getenv("SYSTEMIC_SKEW_POISSON_TAIL", 1e-12))
"""Poisson probability mass allowed outside of a truncated jump series."""

POISSON_MAX_TERMS = int(os.getenv("SYSTEMIC_SKEW_POISSON_MAX_TERMS", 200))
"""Hard cap on the number of jump terms of a series."""

IMPLIED_VOL_BRACKET = _float_pair(
    os.getenv("SYSTEMIC_SKEW_IMPLIED_VOL_BRACKET", "1e-6 5.0")
)
"""Initial bracket of the implied volatility root finder."""

IMPLIED_VOL_MAX_ITERATIONS = int(
    os.getenv("SYSTEMIC_SKEW_IMPLIED_VOL_MAX_ITERATIONS", 100)
)
"""Maximum safeguarded Newton iterations of the implied volatility solver."""

FIXED_POINT_TOLERANCE = float(os.getenv("SYSTEMIC_SKEW_FIXED_POINT_TOLERANCE", 5e-4))
"""Fixed-point vol mismatch tolerance (0.05 vol points)."""

FIXED_POINT_MAX_ITERATIONS = int(
    os.getenv("SYSTEMIC_SKEW_FIXED_POINT_MAX_ITERATIONS", 20)
)
"""Maximum number of fixed-point updates."""

CDF_GRID_SIZE = int(os.getenv("SYSTEMIC_SKEW_CDF_GRID_SIZE", 801))
"""Number of strikes of a marginal distribution grid."""

CDF_GRID_BOUNDS = _float_pair(os.getenv("SYSTEMIC_SKEW_CDF_GRID_BOUNDS", "0.2 3.0"))
"""Marginal distribution grid bounds in moneyness (K/F)."""

CDF_BUMP = float(os.getenv("SYSTEMIC_SKEW_CDF_BUMP", 1e-4))
"""Relative strike bump of the central difference giving the marginal CDF."""

CDF_MONOTONICITY_TOLERANCE = float(
    os.getenv("SYSTEMIC_SKEW_CDF_MONOTONICITY_TOLERANCE", 1e-6)
)
"""Decrease of the raw CDF above which a monotonicity repair is reported."""

QUANTILE_CLAMP = float(os.getenv("SYSTEMIC_SKEW_QUANTILE_CLAMP", 1e-9))
"""Copula uniforms are clamped to [QUANTILE_CLAMP, 1 - QUANTILE_CLAMP]."""

MC_BLOCK_SIZE = int(os.getenv("SYSTEMIC_SKEW_MC_BLOCK_SIZE", 4096))
"""Paths per random substream; fixes the path-to-stream assignment."""

MC_DEFAULT_PATHS = int(os.getenv("SYSTEMIC_SKEW_MC_PATHS", 100000))
"""Default number of Monte Carlo paths."""

MC_DEFAULT_BATCH_SIZE = int(os.getenv("SYSTEMIC_SKEW_MC_BATCH_SIZE", 65536))
"""Default number of paths handed to one worker task."""

MC_DEFAULT_THREADS = int(os.getenv("SYSTEMIC_SKEW_MC_THREADS", 1))
"""Default number of worker threads."""

CALIBRATION_RESTARTS = int(os.getenv("SYSTEMIC_SKEW_CALIBRATION_RESTARTS", 3))
"""Nelder-Mead restarts of the jump tuple calibration."""

CALIBRATION_MAX_EVALUATIONS = int(
    os.getenv("SYSTEMIC_SKEW_CALIBRATION_MAX_EVALUATIONS", 400)
)
"""Objective evaluations allowed per Nelder-Mead restart."""

PSD_TOLERANCE = float(os.getenv("SYSTEMIC_SKEW_PSD_TOLERANCE", 1e-10))
"""Smallest eigenvalue accepted without correlation matrix repair."""

SYMMETRY_TOLERANCE = float(os.getenv("SYSTEMIC_SKEW_SYMMETRY_TOLERANCE", 1e-8))
"""Correlation asymmetry above which symmetrisation is reported."""

DEFAULT_MONEYNESS_GRID = (0.8, 1.2, 9)
"""Default CLI strike grid: minimum and maximum moneyness, number of strikes."""

DEFAULT_SEARCH_SPACE = {
    "lambda_": (0.0, 1.0),
    "k_hat": (-0.4, 0.0),
    "delta": (0.0, 0.4),
    "kappa": (0.0, 2.0),
}
"""Default box of the jump tuple calibration."""
