# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Pytest configuration for Systemic-Skew."""

import os

import numpy as np
import pytest

from systemic_skew.models import JumpParams, McConfig, VolSurfaceSlice

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


@pytest.fixture
def jump_params():
    """Systemic jump tuple of the shipped bundle."""
    return JumpParams(lambda_=0.25, k_hat=-0.16, delta=0.18, sigma0=0.18, kappa=1.0)


@pytest.fixture
def mc():
    """Small seeded Monte Carlo configuration."""
    return McConfig(n_paths=20000, seed=20260101)


@pytest.fixture
def bundle_path():
    """Path of the shipped synthetic DAX-like bundle."""
    return os.path.join(FIXTURES, "dax_synthetic")


@pytest.fixture
def bundle(bundle_path):
    """Loaded synthetic DAX-like bundle."""
    from systemic_skew.marketdata import load_bundle

    return load_bundle(bundle_path)


@pytest.fixture
def skew_slice():
    """Slice factory with a quadratic smile in log-moneyness."""

    def _skew_slice(
        asset_id="ACME",
        forward=100.0,
        maturity=1.0,
        discount=1.0,
        atm=0.22,
        slope=0.2,
        curvature=0.3,
    ):
        strikes = forward * np.linspace(0.7, 1.3, 13)
        x = np.log(strikes / forward)
        vols = atm - slope * x + curvature * x ** 2
        return VolSurfaceSlice(asset_id, maturity, forward, discount, strikes, vols)

    return _skew_slice


@pytest.fixture
def synthetic_components():
    """Component slices generated by the model from constant diffusive vols."""
    from systemic_skew.calibration import model_slice
    from systemic_skew.models import DiffusiveVolCurve

    def _synthetic_components(jump_params, vols=(0.2, 0.25, 0.3), maturity=1.0):
        slices = []
        for index, vol in enumerate(vols):
            forward = 100.0 + 5.0 * index
            slices.append(
                model_slice(
                    "A{}".format(index),
                    forward,
                    maturity,
                    1.0,
                    DiffusiveVolCurve.constant(vol),
                    jump_params,
                    forward * np.linspace(0.7, 1.3, 13),
                )
            )
        return slices

    return _synthetic_components
