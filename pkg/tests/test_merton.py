# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew single asset jump-diffusion tests."""

import numpy as np
import pytest

from systemic_skew.errors import TruncationError, ValidationError
from systemic_skew.models import DiffusiveVolCurve, JumpParams

STRIKES = np.array([70.0, 85.0, 100.0, 115.0, 130.0])


def test_no_jumps_is_black_scholes():
    """Tests for merton_call() without jumps."""
    from systemic_skew.analytic import bs_call
    from systemic_skew.merton import merton_call

    prices = merton_call(100.0, 1.0, STRIKES, 0.2, 0.97, JumpParams.no_jumps())
    np.testing.assert_array_equal(prices, bs_call(100.0, 1.0, STRIKES, 0.2, 0.97))


def test_zero_jump_sizes_are_black_scholes():
    """Tests for jumps that move nothing."""
    from systemic_skew.analytic import bs_call
    from systemic_skew.merton import merton_call

    prices = merton_call(100.0, 2.0, STRIKES, 0.25, 1.0, JumpParams(0.8, 0.0, 0.0))
    np.testing.assert_allclose(prices, bs_call(100.0, 2.0, STRIKES, 0.25), rtol=1e-10)


def test_poisson_terms():
    """Tests for poisson_terms()."""
    from systemic_skew.merton import poisson_terms

    counts, weights = poisson_terms(0.0, 1.0)
    assert counts.tolist() == [0]
    assert weights.tolist() == [1.0]

    counts, weights = poisson_terms(0.5, 2.0)
    assert counts[0] == 0
    assert np.all(np.diff(counts) == 1)
    assert 1.0 - weights.sum() <= 1e-12
    assert weights[0] == pytest.approx(np.exp(-1.0), rel=1e-14)

    with pytest.raises(TruncationError):
        poisson_terms(500.0, 1.0)


@pytest.mark.parametrize(
    "k_hat, sigma, kappa, expected",
    [(-0.16, 0.0, 0.0, -0.16), (-0.16, 0.36, 1.0, -0.32), (-0.1, 0.09, 2.0, -0.025)],
)
def test_scaled_jump_size(k_hat, sigma, kappa, expected):
    """Tests for scaled_jump_size()."""
    from systemic_skew.merton import scaled_jump_size

    assert scaled_jump_size(k_hat, sigma, 0.18, kappa) == pytest.approx(expected)


def test_scaled_jump_size_below_minus_one():
    """Tests for jump sizes scaled beyond a total loss."""
    from systemic_skew.merton import scaled_jump_size

    with pytest.raises(ValidationError):
        scaled_jump_size(-0.6, 0.36, 0.18, 1.0)


def test_merton_put_call_parity(jump_params):
    """Tests for merton_put()."""
    from systemic_skew.merton import merton_call, merton_put

    call = merton_call(100.0, 1.0, STRIKES, 0.2, 0.95, jump_params)
    put = merton_put(100.0, 1.0, STRIKES, 0.2, 0.95, jump_params)
    np.testing.assert_allclose(call - put, 0.95 * (100.0 - STRIKES), atol=1e-10)


def test_negative_jumps_skew(jump_params):
    """Tests for the downward skew of negative jumps."""
    from systemic_skew.merton import merton_implied_vol

    vols = merton_implied_vol(100.0, 1.0, STRIKES, 0.2, 1.0, jump_params)
    assert vols[0] > vols[2] > vols[-1]


def test_skew_flattens_with_diffusive_vol():
    """Tests for a smaller skew at a higher diffusive vol."""
    from systemic_skew.merton import merton_implied_vol

    jump_params = JumpParams(0.25, -0.16, 0.18)

    def spread(sigma):
        vols = merton_implied_vol(100.0, 1.0, [80.0, 120.0], sigma, 1.0, jump_params)
        return vols[0] - vols[1]

    assert spread(0.1) > spread(0.3) > 0


def test_extended_matches_constant_curve(jump_params):
    """Tests for merton_call_extended() on a constant curve."""
    from systemic_skew.merton import merton_call, merton_call_extended

    expected = merton_call(100.0, 1.0, STRIKES, 0.22, 0.98, jump_params)
    prices = merton_call_extended(
        100.0, 1.0, STRIKES, DiffusiveVolCurve.constant(0.22), 0.98, jump_params
    )
    np.testing.assert_allclose(prices, expected, rtol=1e-14)


def test_extended_warns_on_extrapolation(jump_params, caplog):
    """Tests for flat extrapolation of the diffusive vol curve."""
    from systemic_skew.merton import merton_call_extended

    curve = DiffusiveVolCurve([90.0, 100.0, 110.0], [0.25, 0.2, 0.18])
    merton_call_extended(100.0, 1.0, STRIKES, curve, 1.0, jump_params)
    assert "extrapolating flat" in caplog.text


def test_conditional_calls_mix_to_extended(jump_params):
    """Tests for conditional_call() weighted by the Poisson weights."""
    from systemic_skew.merton import (
        conditional_call,
        merton_call_extended,
        poisson_terms,
    )

    curve = DiffusiveVolCurve([70.0, 100.0, 130.0], [0.3, 0.2, 0.17])
    counts, weights = poisson_terms(jump_params.lambda_, 1.0)
    mixture = sum(
        weight * conditional_call(100.0, 1.0, STRIKES, curve, 1.0, jump_params, n)
        for n, weight in zip(counts, weights)
    )
    np.testing.assert_allclose(
        mixture,
        merton_call_extended(100.0, 1.0, STRIKES, curve, 1.0, jump_params),
        rtol=1e-13,
    )


def test_digital_put_dlambda_needs_jumps():
    """Tests for the intensity sensitivity without jumps."""
    from systemic_skew.merton import digital_put_dlambda

    with pytest.raises(ValidationError):
        digital_put_dlambda(100.0, 1.0, 90.0, 0.2, 1.0, JumpParams.no_jumps())


def test_digital_put_dlambda_matches_finite_differences():
    """Tests for digital_put_dlambda() on random inputs."""
    from systemic_skew.merton import digital_put_dlambda, merton_digital_put

    rng = np.random.default_rng(8)
    bump = 1e-5
    for _ in range(20):
        lambda_ = rng.uniform(0.05, 1.0)
        jump_params = JumpParams(lambda_, rng.uniform(-0.4, 0.0), rng.uniform(0.0, 0.4))
        sigma = rng.uniform(0.1, 0.5)
        strike = rng.uniform(70.0, 130.0)
        maturity = rng.uniform(0.25, 2.0)
        args = (100.0, maturity, strike, sigma, 0.97)
        expected = (
            merton_digital_put(*args, jump_params.replace(lambda_=lambda_ + bump))
            - merton_digital_put(*args, jump_params.replace(lambda_=lambda_ - bump))
        ) / (2 * bump)
        assert digital_put_dlambda(*args, jump_params) == pytest.approx(
            expected, abs=1e-6
        )


def test_digital_put_dlambda_with_scaled_jumps():
    """Tests for the intensity sensitivity with vol scaled jump sizes."""
    from systemic_skew.merton import digital_put_dlambda, merton_digital_put

    jump_params = JumpParams(0.3, -0.1, 0.1, sigma0=0.18, kappa=1.0)
    args = (100.0, 1.0, 85.0, 0.27, 1.0)
    bump = 1e-5
    expected = (
        merton_digital_put(*args, jump_params.replace(lambda_=0.3 + bump))
        - merton_digital_put(*args, jump_params.replace(lambda_=0.3 - bump))
    ) / (2 * bump)
    assert digital_put_dlambda(*args, jump_params) == pytest.approx(
        expected, abs=1e-6
    )


def test_lognormal_marginal_distribution():
    """Tests for marginal_distribution() without jumps."""
    from systemic_skew.analytic import norm_cdf
    from systemic_skew.merton import marginal_distribution

    marginal = marginal_distribution(
        100.0, 1.0, DiffusiveVolCurve.constant(0.2), 1.0, JumpParams.no_jumps()
    )
    nodes = marginal.strikes[::50]
    d2 = (np.log(100.0 / nodes) - 0.02) / 0.2
    np.testing.assert_allclose(marginal.cdf(nodes), norm_cdf(-d2), atol=1e-6)
    assert marginal.mean() == pytest.approx(100.0, rel=1e-3)
    np.testing.assert_allclose(
        marginal.quantile(marginal.cdf_values[300:500:20]),
        marginal.strikes[300:500:20],
        rtol=1e-6,
    )


def test_quantile_clamps():
    """Tests for the quantile clamp count."""
    from systemic_skew.merton import marginal_distribution

    marginal = marginal_distribution(
        100.0, 1.0, DiffusiveVolCurve.constant(0.2), 1.0, JumpParams.no_jumps()
    )
    values, clamped = marginal.quantile(
        np.array([0.0, 0.5, 1.0]), return_clamped=True
    )
    assert clamped == 2
    assert marginal.strikes[0] <= values[0] < values[1] < values[2]
    assert values[2] <= marginal.strikes[-1]


def test_jump_marginal_distribution(jump_params):
    """Tests for marginal_distribution() with jumps and a skewed curve."""
    from systemic_skew.merton import marginal_distribution

    curve = DiffusiveVolCurve([70.0, 100.0, 130.0], [0.28, 0.2, 0.18])
    marginal = marginal_distribution(100.0, 1.0, curve, 0.98, jump_params)
    assert np.all(np.diff(marginal.cdf_values) >= 0)
    assert 0 <= marginal.cdf_values[0] and marginal.cdf_values[-1] <= 1
    assert marginal.mean() == pytest.approx(100.0, rel=5e-3)

    conditional = marginal_distribution(
        100.0, 1.0, curve, 0.98, jump_params, jumps=2
    )
    assert conditional.jumps == 2
    assert conditional.mean() < marginal.mean()


def test_marginal_warns_on_narrow_curve(jump_params, caplog):
    """Tests for the coverage warning of marginal_distribution()."""
    from systemic_skew.merton import marginal_distribution

    narrow = DiffusiveVolCurve([70.0, 100.0, 130.0], [0.28, 0.2, 0.18])
    marginal_distribution(100.0, 1.0, narrow, 1.0, jump_params, asset_id="NARROW")
    assert "Diffusive vol curve of NARROW spans [0.7, 1.3] F" in caplog.text

    caplog.clear()
    wide = DiffusiveVolCurve([20.0, 100.0, 300.0], [0.28, 0.2, 0.18])
    marginal_distribution(100.0, 1.0, wide, 1.0, jump_params, asset_id="WIDE")
    assert "spans" not in caplog.text


def test_marginal_mean_on_bundle(bundle):
    """Tests for the forward as mean of calibrated marginals."""
    from systemic_skew.calibration import fixed_point_diffusive_vol
    from systemic_skew.merton import marginal_distribution

    rng = np.random.default_rng(21)
    uniforms = rng.random(10 ** 6)
    for slice_ in bundle.component_slices(1.0):
        curve, report = fixed_point_diffusive_vol(
            slice_, bundle.jump_params, tolerance=1e-5, max_iterations=60
        )
        assert report.converged
        marginal = marginal_distribution(
            slice_.forward,
            1.0,
            curve,
            slice_.discount,
            bundle.jump_params,
            asset_id=slice_.asset_id,
        )
        assert marginal.mean() == pytest.approx(slice_.forward, rel=5e-4)
        samples = marginal.quantile(uniforms)
        std_error = samples.std(ddof=1) / np.sqrt(samples.size)
        assert abs(samples.mean() - slice_.forward) <= 3 * std_error


def test_simulation_is_thread_independent(jump_params):
    """Tests for simulate_merton_paths() across thread counts."""
    from systemic_skew.merton import simulate_merton_paths

    n_paths = 3 * 4096 + 10
    single = simulate_merton_paths(100.0, 1.0, 0.2, jump_params, n_paths, seed=3)
    threaded = simulate_merton_paths(
        100.0, 1.0, 0.2, jump_params, n_paths, seed=3, threads=4
    )
    assert single.shape == (n_paths,)
    np.testing.assert_array_equal(single, threaded)


@pytest.mark.slow
def test_series_agrees_with_simulation():
    """Tests for merton_call() against exact path simulation."""
    from systemic_skew.merton import merton_call, simulate_merton_paths

    rng = np.random.default_rng(2)
    for seed in range(20):
        jump_params = JumpParams(
            rng.uniform(0.0, 1.0), rng.uniform(-0.4, 0.0), rng.uniform(0.0, 0.4)
        )
        sigma = rng.uniform(0.1, 0.5)
        strike = 100.0 * rng.uniform(0.8, 1.2)
        paths = simulate_merton_paths(100.0, 1.0, sigma, jump_params, 200000, seed)
        payoff = np.maximum(paths - strike, 0.0)
        std_error = payoff.std(ddof=1) / np.sqrt(payoff.size)
        expected = merton_call(100.0, 1.0, strike, sigma, 1.0, jump_params)
        assert abs(payoff.mean() - expected) <= 4 * std_error


def test_merton_digital_put_is_put_slope(jump_params):
    """Tests for merton_digital_put() against the strike slope of the put."""
    from systemic_skew.merton import merton_digital_put, merton_put

    strikes = np.array([60.0, 80.0, 100.0, 120.0, 140.0])
    bump = 1e-3
    slope = (
        merton_put(100.0, 1.0, strikes + bump, 0.2, 0.97, jump_params)
        - merton_put(100.0, 1.0, strikes - bump, 0.2, 0.97, jump_params)
    ) / (2 * bump)
    np.testing.assert_allclose(
        merton_digital_put(100.0, 1.0, strikes, 0.2, 0.97, jump_params),
        slope,
        atol=1e-7,
    )


def test_digital_put_against_simulation():
    """Tests for merton_digital_put() against the simulated exercise frequency."""
    from systemic_skew.merton import merton_digital_put, simulate_merton_paths

    jump_params = JumpParams(0.25, -0.16, 0.18)
    paths = simulate_merton_paths(100.0, 1.0, 0.2, jump_params, 200000, seed=8)
    exercised = (paths < 70.0).astype(float)
    std_error = exercised.std(ddof=1) / np.sqrt(exercised.size)
    expected = merton_digital_put(100.0, 1.0, 70.0, 0.2, 1.0, jump_params)
    assert abs(exercised.mean() - expected) <= 3 * std_error


@pytest.mark.slow
def test_simulation_is_a_martingale(jump_params):
    """Tests for the mean of simulate_merton_paths()."""
    from systemic_skew.merton import simulate_merton_paths

    paths = simulate_merton_paths(100.0, 1.0, 0.2, jump_params, 10 ** 6, seed=11)
    std_error = paths.std(ddof=1) / np.sqrt(paths.size)
    assert abs(paths.mean() - 100.0) <= 3 * std_error
