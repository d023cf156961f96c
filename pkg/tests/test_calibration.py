# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew calibration tests."""

import numpy as np
import pytest

from systemic_skew.errors import (
    ConvergenceError,
    InfeasibleCorrelationError,
    NegativeVolError,
    ValidationError,
)
from systemic_skew.models import JumpParams, VolSurfaceSlice

MONEYNESS = np.array([0.9, 0.95, 1.0, 1.05, 1.1])


def test_fixed_point_without_jumps(skew_slice):
    """Tests for fixed_point_diffusive_vol() in the Black-Scholes limit."""
    from systemic_skew.calibration import fixed_point_diffusive_vol

    slice_ = skew_slice()
    curve, report = fixed_point_diffusive_vol(slice_, JumpParams.no_jumps())
    assert report.converged
    assert report.iterations == 1
    assert len(report.mismatches) == 2
    assert report.mismatches[-1] < 1e-6
    np.testing.assert_allclose(curve.vols, slice_.vols, atol=1e-12)


def test_fixed_point_recovers_constant_vol(jump_params, synthetic_components):
    """Tests for the fixed point on prices generated from a constant vol."""
    from systemic_skew.calibration import fixed_point_diffusive_vol

    jump_params = jump_params.replace(kappa=0.0)
    (slice_,) = synthetic_components(jump_params, vols=(0.2,))
    curve, report = fixed_point_diffusive_vol(
        slice_, jump_params, tolerance=1e-6, max_iterations=50
    )
    assert report.converged
    assert report.mismatches[-1] <= 1e-6
    np.testing.assert_allclose(curve.vols, 0.2, atol=1e-4)


def test_fixed_point_on_bundle(bundle):
    """Tests for the fixed point on a shipped component slice."""
    from systemic_skew.calibration import fixed_point_diffusive_vol

    slice_ = bundle.slice("SAP", 1.0)
    curve, report = fixed_point_diffusive_vol(slice_, bundle.jump_params)
    assert report.converged
    assert len(report.mismatches) == report.iterations + 1
    assert report.mismatches[-1] <= 5e-4 < report.mismatches[0]
    assert np.all(curve.vols > 0)
    # jumps carry part of the variance
    assert curve(slice_.forward) < slice_.atm_vol()


def test_fixed_point_steep_skew(jump_params):
    """Tests for the fixed point contraction on a steep skew."""
    from systemic_skew.calibration import fixed_point_diffusive_vol

    slice_ = VolSurfaceSlice(
        "STEEP",
        1.0,
        100.0,
        1.0,
        100.0 * np.linspace(0.7, 1.3, 13),
        np.linspace(0.32, 0.18, 13),
    )
    _, report = fixed_point_diffusive_vol(slice_, jump_params)
    assert report.converged
    assert report.iterations <= 5
    assert report.mismatches[-1] <= 5e-4
    assert report.mismatches[2] <= 0.25 * report.mismatches[0]


def test_fixed_point_iteration_limit(skew_slice, jump_params):
    """Tests for the fixed point without any update allowed."""
    from systemic_skew.calibration import fixed_point_diffusive_vol

    with pytest.raises(ConvergenceError) as error:
        fixed_point_diffusive_vol(skew_slice(), jump_params, max_iterations=0)
    assert error.value.exit_code == 4
    assert error.value.report.iterations == 0
    assert len(error.value.report.mismatches) == 1
    assert not error.value.report.converged


def test_fixed_point_negative_vol():
    """Tests for jumps too large for a flat low vol slice."""
    from systemic_skew.calibration import fixed_point_diffusive_vol

    strikes = np.linspace(70.0, 130.0, 13)
    slice_ = VolSurfaceSlice("LOW", 1.0, 100.0, 1.0, strikes, [0.1] * 13)
    with pytest.raises(NegativeVolError) as error:
        fixed_point_diffusive_vol(slice_, JumpParams(1.0, -0.3, 0.3))
    assert error.value.exit_code == 3
    assert "too aggressive" in str(error.value)


def test_total_correlation():
    """Tests for total_correlation()."""
    from systemic_skew.calibration import total_correlation

    assert total_correlation(0.3, JumpParams.no_jumps(), -1.0, -1.0) == 0.3
    assert total_correlation(0.3, JumpParams(1e8, -0.5, 0.0), -0.5, -0.5) >= 0.999
    assert total_correlation(0.0, JumpParams(1.0, -0.5, 0.0), -1.0, -1.0) == (
        pytest.approx(0.5)
    )
    with pytest.raises(ValidationError):
        total_correlation(1.5, JumpParams.no_jumps(), -1.0, -1.0)


def test_total_correlation_example():
    """Tests for total_correlation() on two equal jump sizes."""
    from systemic_skew.calibration import total_correlation

    jump_params = JumpParams(0.25, -0.16, 0.0)
    assert total_correlation(0.5, jump_params, -0.16, -0.16) == pytest.approx(
        0.50318, abs=5e-6
    )


@pytest.mark.parametrize(
    "rho, k_i, k_j, expected",
    [(0.6, -1.0, -1.0, 4.0), (0.6, -1.0, 1.0, 0.25), (0.6, 0.0, 0.0, np.inf)],
)
def test_feasible_lambda_range(rho, k_i, k_j, expected):
    """Tests for feasible_lambda_range()."""
    from systemic_skew.calibration import feasible_lambda_range

    low, high = feasible_lambda_range(rho, k_i, k_j)
    assert low == 0.0
    assert high == pytest.approx(expected)


def test_diffusive_correlation_round_trip():
    """Tests for diffusive_correlation_for_target()."""
    from systemic_skew.calibration import (
        diffusive_correlation_for_target,
        total_correlation,
    )

    jump_params = JumpParams(0.5, -0.16, 0.0)
    rho = diffusive_correlation_for_target(0.5, jump_params, -0.8, -0.9)
    assert -1 <= rho < 0.5
    assert total_correlation(rho, jump_params, -0.8, -0.9) == pytest.approx(
        0.5, abs=1e-12
    )


def test_infeasible_correlation():
    """Tests for total correlations out of reach of the diffusion."""
    from systemic_skew.calibration import diffusive_correlation_for_target

    with pytest.raises(InfeasibleCorrelationError) as error:
        diffusive_correlation_for_target(0.6, JumpParams(5.0, -0.16, 0.0), -1.0, -1.0)
    assert error.value.exit_code == 4
    assert error.value.feasible_lambda[1] == pytest.approx(4.0)

    with pytest.raises(ValidationError):
        diffusive_correlation_for_target(1.2, JumpParams.no_jumps(), -1.0, -1.0)


def test_diffusive_correlation_matrix():
    """Tests for diffusive_correlation_matrix()."""
    from systemic_skew.calibration import (
        diffusive_correlation_matrix,
        total_correlation,
    )

    jump_params = JumpParams(0.5, -0.16, 0.0)
    sizes = np.array([-0.8, -0.9, -0.6])
    rho_total = np.array([[1.0, 0.5, 0.4], [0.5, 1.0, 0.6], [0.4, 0.6, 1.0]])
    rho = diffusive_correlation_matrix(rho_total, jump_params, sizes)
    np.testing.assert_allclose(np.diag(rho), 1.0)
    assert total_correlation(rho[1, 2], jump_params, -0.9, -0.6) == pytest.approx(
        0.6, abs=1e-10
    )

    with pytest.raises(InfeasibleCorrelationError) as error:
        diffusive_correlation_matrix(
            rho_total, jump_params.replace(lambda_=50.0), sizes, ["A", "B", "C"]
        )
    assert "Pair (A, B)" in str(error.value)


def test_search_space():
    """Tests for SearchSpace."""
    from systemic_skew.calibration import SearchSpace

    space = SearchSpace()
    assert not space.is_point()
    np.testing.assert_allclose(space.starting_points(3)[0], space.center())
    assert len(space.starting_points(7)) == 7
    params = space.to_params([5.0, -0.1, 0.1, 1.0])
    assert params.lambda_ == space.lambda_[1]
    assert params.sigma0 == space.sigma0

    point = SearchSpace.point(JumpParams(0.25, -0.16, 0.18, kappa=1.0))
    assert point.is_point()
    assert point.to_params(point.center()).kappa == 1.0

    with pytest.raises(ValidationError):
        SearchSpace(lambda_=(1.0, 0.5))


def test_tuple_calibration_needs_seed(skew_slice, synthetic_components, jump_params):
    """Tests for calibrate_jump_tuple() without Monte Carlo settings."""
    from systemic_skew.calibration import calibrate_jump_tuple

    components = synthetic_components(jump_params)
    with pytest.raises(ValidationError):
        calibrate_jump_tuple(
            skew_slice("INDEX"), components, [1 / 3] * 3, np.eye(3), mc=None
        )


def test_tuple_calibration_at_a_point(synthetic_components, jump_params, mc):
    """Tests for calibrate_jump_tuple() on a collapsed box."""
    from systemic_skew.basket import flat_correlation
    from systemic_skew.calibration import (
        SearchSpace,
        calibrate_jump_tuple,
        model_index_slice,
    )

    components = synthetic_components(jump_params)
    weights = [1 / 3] * 3
    rho_total = flat_correlation(3, 0.5)
    target = model_index_slice(
        components, weights, rho_total, jump_params, mc, MONEYNESS
    )
    calibrated, report = calibrate_jump_tuple(
        target,
        components,
        weights,
        rho_total,
        SearchSpace.point(jump_params),
        mc,
    )
    assert calibrated == jump_params
    assert report.converged
    assert report.iterations == 1
    assert report.objective == pytest.approx(0.0, abs=1e-12)
    assert report.to_dict()["jump_params"]["lambda"] == 0.25


def test_tuple_calibration_infeasible_box(skew_slice, synthetic_components, mc):
    """Tests for a search box reaching infeasible intensities."""
    from systemic_skew.basket import flat_correlation
    from systemic_skew.calibration import SearchSpace, calibrate_jump_tuple

    components = synthetic_components(JumpParams(0.25, -0.16, 0.18))
    space = SearchSpace(
        lambda_=(0.0, 1000.0),
        k_hat=(-0.16, -0.16),
        delta=(0.18, 0.18),
        kappa=(0.0, 0.0),
    )
    with pytest.raises(InfeasibleCorrelationError) as error:
        calibrate_jump_tuple(
            skew_slice("INDEX"),
            components,
            [1 / 3] * 3,
            flat_correlation(3, 0.5),
            space,
            mc,
        )
    low, high = error.value.feasible_lambda
    assert low == 0.0 and high < 1000.0


@pytest.mark.slow
def test_tuple_calibration_recovers_intensity(synthetic_components, jump_params, mc):
    """Tests for calibrate_jump_tuple() on a synthetic index skew."""
    from systemic_skew.basket import flat_correlation
    from systemic_skew.calibration import (
        SearchSpace,
        calibrate_jump_tuple,
        model_index_slice,
    )

    truth = jump_params.replace(lambda_=0.3)
    components = synthetic_components(truth)
    weights = [0.3, 0.3, 0.4]
    rho_total = flat_correlation(3, 0.5)
    target = model_index_slice(
        components, weights, rho_total, truth, mc, MONEYNESS, tolerance=1e-5
    )
    space = SearchSpace(
        lambda_=(0.1, 0.6),
        k_hat=(truth.k_hat,) * 2,
        delta=(truth.delta,) * 2,
        kappa=(truth.kappa,) * 2,
        sigma0=truth.sigma0,
    )
    calibrated, report = calibrate_jump_tuple(
        target,
        components,
        weights,
        rho_total,
        space,
        mc,
        restarts=1,
        max_evaluations=60,
        tolerance=1e-5,
    )
    assert report.objective < 1e-6
    assert calibrated.lambda_ == pytest.approx(0.3, rel=0.1)


@pytest.mark.slow
def test_total_correlation_against_simulation():
    """Tests for total_correlation() on simulated log returns."""
    from systemic_skew.calibration import total_correlation
    from systemic_skew.merton import simulate_basket_paths

    rng = np.random.default_rng(9)
    for seed in range(10):
        lambda_ = rng.uniform(50.0, 100.0)
        sizes = rng.uniform(-0.3, -0.05, 2)
        rho = rng.uniform(-0.5, 0.8)
        jump_params = JumpParams(lambda_, -0.1, 0.0)
        paths = simulate_basket_paths(
            [1.0, 1.0],
            [1.0, 1.0],
            [[1.0, rho], [rho, 1.0]],
            jump_params,
            0.001,
            10 ** 6,
            seed,
            jump_sizes=sizes,
        )
        returns = np.log(paths)
        sample = np.corrcoef(returns[:, 0], returns[:, 1])[0, 1]
        expected = total_correlation(
            rho, jump_params, np.log1p(sizes[0]), np.log1p(sizes[1])
        )
        assert sample == pytest.approx(expected, abs=0.01)


@pytest.mark.slow
def test_total_correlation_example_against_simulation():
    """Tests for the equal jump size correlation on simulated log returns."""
    from systemic_skew.calibration import total_correlation
    from systemic_skew.merton import simulate_basket_paths

    jump_params = JumpParams(0.25, -0.16, 0.0)
    paths = simulate_basket_paths(
        [1.0, 1.0],
        [1.0, 1.0],
        [[1.0, 0.5], [0.5, 1.0]],
        jump_params,
        1.0,
        10 ** 6,
        4,
        jump_sizes=np.expm1([-0.16, -0.16]),
    )
    returns = np.log(paths)
    sample = np.corrcoef(returns[:, 0], returns[:, 1])[0, 1]
    expected = total_correlation(0.5, jump_params, -0.16, -0.16)
    assert sample == pytest.approx(expected, abs=0.01)


@pytest.mark.slow
def test_tuple_calibration_recovers_tuple(synthetic_components, jump_params, mc):
    """Tests for calibrate_jump_tuple() over all four jump parameters."""
    from systemic_skew.basket import flat_correlation
    from systemic_skew.calibration import (
        SearchSpace,
        calibrate_jump_tuple,
        model_index_slice,
    )

    components = synthetic_components(jump_params, vols=(0.15, 0.2, 0.25, 0.3, 0.35))
    weights = [0.2] * 5
    rho_total = flat_correlation(5, 0.5)
    target = model_index_slice(
        components, weights, rho_total, jump_params, mc, MONEYNESS, tolerance=1e-5
    )
    space = SearchSpace(
        lambda_=(0.125, 0.375),
        k_hat=(-0.24, -0.08),
        delta=(0.09, 0.27),
        kappa=(0.5, 1.5),
        sigma0=jump_params.sigma0,
    )
    calibrated, report = calibrate_jump_tuple(
        target,
        components,
        weights,
        rho_total,
        space,
        mc,
        restarts=1,
        max_evaluations=80,
        tolerance=1e-5,
    )
    assert report.objective < 1e-8
    for name in SearchSpace.names:
        assert getattr(calibrated, name) == pytest.approx(
            getattr(jump_params, name), rel=0.1
        )


@pytest.mark.slow
def test_tuple_calibration_beats_gaussian_copula(bundle, mc):
    """Tests for the calibrated tuple against the jump-free copula."""
    from systemic_skew.calibration import SearchSpace, calibrate_jump_tuple

    jump_params = bundle.jump_params
    mc = mc.replace(n_paths=100000)
    arguments = (
        bundle.index_slice(1.0),
        bundle.component_slices(1.0),
        bundle.weight_vector(),
        bundle.correlation,
    )
    space = SearchSpace(
        lambda_=(0.05, 0.5),
        k_hat=(jump_params.k_hat,) * 2,
        delta=(jump_params.delta,) * 2,
        kappa=(jump_params.kappa,) * 2,
        sigma0=jump_params.sigma0,
    )
    _, report = calibrate_jump_tuple(
        *arguments, space, mc, restarts=1, max_evaluations=20
    )
    _, baseline = calibrate_jump_tuple(
        *arguments, SearchSpace.point(jump_params.replace(lambda_=0.0)), mc
    )
    assert baseline.converged
    assert 4 * report.objective <= baseline.objective
