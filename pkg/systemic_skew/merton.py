# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Single asset Merton jump-diffusion.

Prices are Poisson mixtures of Black-Scholes prices. Conditional on ``n``
jumps the forward is ``F (1 + k)**n exp(-lambda k T)`` and the vol is
``sqrt(sigma**2 + n delta**2 / T)``, where ``k`` is the jump size scaled
with the diffusive vol of the asset.
"""

import logging

import numpy as np
from scipy.stats import poisson

from systemic_skew.analytic import (
    bs_call,
    bs_digital_put,
    implied_vol,
    norm_pdf,
    norm_ppf,
    TINY_STD,
    validate_inputs,
)
from systemic_skew.config import (
    CDF_BUMP,
    CDF_GRID_BOUNDS,
    CDF_GRID_SIZE,
    CDF_MONOTONICITY_TOLERANCE,
    POISSON_MAX_TERMS,
    POISSON_TAIL_TOLERANCE,
)
from systemic_skew.errors import TruncationError, ValidationError
from systemic_skew.models import MarginalDistribution
from systemic_skew.sampling import (
    Stream,
    block_uniforms,
    correlated_normals,
    run_blocks,
)
from systemic_skew.utils import correlation_factor, repair_correlation

GRID_STANDARD_DEVIATIONS = 6.0
"""Total standard deviations each side of the forward covered by a CDF grid."""

COVERAGE_TOLERANCE = 1e-6
"""Relative slack of the strike coverage check of a diffusive vol curve."""


def scaled_jump_size(k_hat, sigma, sigma0, kappa):
    """Jump size of an asset, ``(sigma / sigma0)**kappa * k_hat``.

    :raises ValidationError: Invalid inputs or a scaled jump of -100% or
        worse.
    """
    if not k_hat > -1:
        raise ValidationError("Jump size k_hat must be > -1, got {}.".format(k_hat))
    if not sigma0 > 0 or not kappa >= 0:
        raise ValidationError(
            "Need sigma0 > 0 and kappa >= 0, got {} and {}.".format(sigma0, kappa)
        )
    if kappa == 0:
        return float(k_hat)
    if not sigma > 0:
        raise ValidationError("Diffusive vol must be > 0, got {}.".format(sigma))
    scaled = (sigma / sigma0) ** kappa * k_hat
    if scaled <= -1:
        raise ValidationError(
            "Scaled jump size {} (k_hat={}, sigma={}, sigma0={}, kappa={}) "
            "would make the price nonpositive.".format(
                scaled, k_hat, sigma, sigma0, kappa
            )
        )
    return float(scaled)


def poisson_terms(lambda_, maturity):
    """Jump counts and Poisson weights of a truncated series.

    The series stops at the smallest count whose tail mass is below
    ``POISSON_TAIL_TOLERANCE``.

    :raises TruncationError: The tail is still too heavy after
        ``POISSON_MAX_TERMS`` terms.
    """
    mean = lambda_ * maturity
    if mean == 0:
        return np.array([0]), np.array([1.0])
    counts = np.arange(POISSON_MAX_TERMS + 1)
    tail = poisson.sf(counts, mean)
    small = np.flatnonzero(tail <= POISSON_TAIL_TOLERANCE)
    if small.size == 0:
        raise TruncationError(
            "Poisson tail mass {:.3g} exceeds {} after {} terms (lambda*T={}).".format(
                tail[-1], POISSON_TAIL_TOLERANCE, POISSON_MAX_TERMS, mean
            )
        )
    counts = counts[: small[0] + 1]
    return counts, poisson.pmf(counts, mean)


def term_forward(forward, maturity, jump_params, jump_size, jumps):
    return (
        forward
        * (1.0 + jump_size) ** jumps
        * np.exp(-jump_params.lambda_ * jump_size * maturity)
    )


def term_vol(sigma, maturity, jump_params, jumps):
    return np.hypot(sigma, jump_params.delta * np.sqrt(jumps / maturity))


def _series(payoff, forward, maturity, strike, sigma, discount, jump_params, jump_size):
    counts, weights = poisson_terms(jump_params.lambda_, maturity)
    total = 0.0
    for jumps, weight in zip(counts, weights):
        total = total + weight * payoff(
            term_forward(forward, maturity, jump_params, jump_size, jumps),
            maturity,
            strike,
            term_vol(sigma, maturity, jump_params, jumps),
            discount,
        )
    return total


def merton_call(forward, maturity, strike, sigma, discount, jump_params):
    """Merton call price with a constant diffusive vol.

    :param forward: Forward price.
    :param maturity: Maturity in years.
    :param strike: Strike or array of strikes.
    :param sigma: Diffusive vol, also used to scale the jump size.
    :param discount: Discount factor.
    :param jump_params: :class:`~systemic_skew.models.JumpParams`.
    """
    validate_inputs(forward, maturity, strike, discount, sigma)
    jump_size = jump_params.jump_size(sigma)
    return _series(
        bs_call, forward, maturity, strike, sigma, discount, jump_params, jump_size
    )


def merton_put(forward, maturity, strike, sigma, discount, jump_params):
    """Merton put price by put-call parity."""
    call = merton_call(forward, maturity, strike, sigma, discount, jump_params)
    return call - discount * (forward - np.asarray(strike, dtype=float))


def merton_implied_vol(forward, maturity, strike, sigma, discount, jump_params):
    """Black-Scholes implied vols of Merton call prices."""
    strikes = np.atleast_1d(np.asarray(strike, dtype=float))
    prices = np.atleast_1d(
        merton_call(forward, maturity, strikes, sigma, discount, jump_params)
    )
    vols = np.array(
        [
            implied_vol(price, forward, maturity, k, discount)
            for price, k in zip(prices, strikes)
        ]
    )
    return vols.item() if np.ndim(strike) == 0 else vols


def _extended_series(forward, maturity, strike, curve, discount, jump_params):
    jump_size = jump_params.jump_size(curve(forward))
    return _series(
        bs_call,
        forward,
        maturity,
        strike,
        curve(strike),
        discount,
        jump_params,
        jump_size,
    )


def merton_call_extended(forward, maturity, strike, curve, discount, jump_params):
    """Merton call price with a strike-dependent diffusive vol.

    Every term uses ``curve(K)``; the jump size is scaled with the vol at
    the forward.
    """
    validate_inputs(forward, maturity, strike, discount)
    outside = curve.is_extrapolating(strike)
    if np.any(outside):
        logging.warning(
            "{} strike(s) outside of the diffusive vol grid [{}, {}], "
            "extrapolating flat.".format(
                np.count_nonzero(outside), curve.strikes[0], curve.strikes[-1]
            )
        )
    return _extended_series(forward, maturity, strike, curve, discount, jump_params)


def conditional_call(forward, maturity, strike, curve, discount, jump_params, jumps):
    """Call price conditional on exactly ``jumps`` jumps up to maturity."""
    validate_inputs(forward, maturity, strike, discount)
    jump_size = jump_params.jump_size(curve(forward))
    return bs_call(
        term_forward(forward, maturity, jump_params, jump_size, jumps),
        maturity,
        strike,
        term_vol(curve(strike), maturity, jump_params, jumps),
        discount,
    )


def merton_digital_put(forward, maturity, strike, sigma, discount, jump_params):
    """Price of a digital put paying one unit below the strike."""
    validate_inputs(forward, maturity, strike, discount, sigma)
    jump_size = jump_params.jump_size(sigma)
    return _series(
        bs_digital_put,
        forward,
        maturity,
        strike,
        sigma,
        discount,
        jump_params,
        jump_size,
    )


def digital_put_dlambda(forward, maturity, strike, sigma, discount, jump_params):
    """Sensitivity of :func:`merton_digital_put` to the jump intensity.

    Differentiates both the Poisson weights, ``dw_n = T (w_{n-1} - w_n)``,
    and the compensated term forwards.
    """
    validate_inputs(forward, maturity, strike, discount, sigma)
    if not jump_params.lambda_ > 0:
        raise ValidationError(
            "Intensity sensitivity needs lambda > 0, got {}.".format(
                jump_params.lambda_
            )
        )
    jump_size = jump_params.jump_size(sigma)
    counts, weights = poisson_terms(jump_params.lambda_, maturity)
    strike = np.asarray(strike, dtype=float)
    previous = 0.0
    total = 0.0
    for jumps, weight in zip(counts, weights):
        forward_n = term_forward(forward, maturity, jump_params, jump_size, jumps)
        vol_n = term_vol(sigma, maturity, jump_params, jumps)
        price = bs_digital_put(forward_n, maturity, strike, vol_n, discount)
        std = vol_n * np.sqrt(maturity)
        if std > TINY_STD:
            d2 = np.log(forward_n / strike) / std - 0.5 * std
            dprice = discount * norm_pdf(d2) * jump_size * maturity / std
        else:
            dprice = np.zeros_like(strike)
        dweight = maturity * (previous - weight)
        total = total + dweight * price + weight * dprice
        previous = weight
    return total.item() if np.ndim(total) == 0 else total


def _grid_bounds(forward, maturity, curve, jump_params, jumps):
    atm = curve(forward)
    jump_size = jump_params.jump_size(atm)
    vol = max(atm, float(np.max(curve.vols)))
    if jumps is None:
        center = 1.0
        variance = vol ** 2 * maturity + jump_params.lambda_ * maturity * (
            np.log1p(jump_size) ** 2 + jump_params.delta ** 2
        )
    else:
        center = term_forward(1.0, maturity, jump_params, jump_size, jumps)
        variance = vol ** 2 * maturity + jumps * jump_params.delta ** 2
    spread = GRID_STANDARD_DEVIATIONS * np.sqrt(variance)
    low, high = CDF_GRID_BOUNDS
    return min(low, center * np.exp(-spread)), max(high, center * np.exp(spread))


def _check_coverage(forward, curve, asset_id):
    if curve.is_constant:
        return
    low, high = CDF_GRID_BOUNDS
    first, last = curve.strikes[0] / forward, curve.strikes[-1] / forward
    if first > low * (1.0 + COVERAGE_TOLERANCE) or last < high * (
        1.0 - COVERAGE_TOLERANCE
    ):
        logging.warning(
            "Diffusive vol curve of {} spans [{:.4g}, {:.4g}] F instead of [{}, {}] F; "
            "its flat extension can shift mass of the marginal.".format(
                asset_id or "asset", first, last, low, high
            )
        )


def marginal_distribution(
    forward,
    maturity,
    curve,
    discount,
    jump_params,
    jumps=None,
    strikes=None,
    asset_id=None,
):
    """Terminal distribution implied by extended Merton call prices.

    ``cdf(K) = 1 + dC/dK / Df`` by central differences, which carries the
    slope of ``curve``. The raw CDF is repaired to be nondecreasing in
    [0, 1]. A curve that does not cover ``CDF_GRID_BOUNDS`` times the
    forward is reported, as the kink of its flat extension biases the mean.

    :param jumps: Build the distribution conditional on this many jumps
        instead of the full mixture.
    :param strikes: Strike grid; by default ``CDF_GRID_SIZE`` geometric
        strikes on ``CDF_GRID_BOUNDS`` times the forward, widened to cover
        six standard deviations.
    :rtype: :class:`~systemic_skew.models.MarginalDistribution`
    """
    validate_inputs(forward, maturity, forward, discount)
    _check_coverage(forward, curve, asset_id)
    if strikes is None:
        low, high = _grid_bounds(forward, maturity, curve, jump_params, jumps)
        strikes = np.geomspace(low * forward, high * forward, CDF_GRID_SIZE)
    strikes = np.asarray(strikes, dtype=float)

    if jumps is None:

        def price(strike):
            return _extended_series(
                forward, maturity, strike, curve, discount, jump_params
            )

    else:

        def price(strike):
            return conditional_call(
                forward, maturity, strike, curve, discount, jump_params, jumps
            )

    bump = CDF_BUMP * strikes
    slope = (price(strikes + bump) - price(strikes - bump)) / (2.0 * bump)
    raw = 1.0 + slope / discount
    decrease = -np.min(np.diff(raw)) if raw.size > 1 else 0.0
    if decrease > CDF_MONOTONICITY_TOLERANCE:
        logging.warning(
            "Marginal CDF of {} decreases by {:.3g}, repairing monotonicity.".format(
                asset_id or "asset", decrease
            )
        )
    cdf = np.clip(np.maximum.accumulate(raw), 0.0, 1.0)
    return MarginalDistribution(
        strikes, cdf, forward, maturity, asset_id=asset_id, jumps=jumps
    )


def _jump_counts(uniforms, mean):
    if mean == 0:
        return np.zeros(uniforms.shape)
    return poisson.ppf(uniforms, mean)


def simulate_merton_paths(
    forward, maturity, sigma, jump_params, n_paths, seed, threads=1
):
    """Exact terminal samples of the single asset jump-diffusion.

    Every path draws a Poisson jump count, a diffusion normal and a jump
    normal from its block substream.

    :return: Array of ``n_paths`` terminal prices in path order.
    """
    validate_inputs(forward, maturity, forward, 1.0, sigma)
    if n_paths < 1:
        raise ValidationError("Need at least one path, got {}.".format(n_paths))
    jump_size = jump_params.jump_size(sigma)
    mean = jump_params.lambda_ * maturity
    drift = -0.5 * sigma ** 2 * maturity - mean * jump_size

    def simulate(block, size):
        uniforms = block_uniforms(seed, Stream.merton_paths, block, size, 3)
        jumps = _jump_counts(uniforms[:, 0], mean)
        normals = norm_ppf(uniforms)
        log_return = (
            drift
            + sigma * np.sqrt(maturity) * normals[:, 1]
            + jumps * (np.log1p(jump_size) - 0.5 * jump_params.delta ** 2)
            + jump_params.delta * np.sqrt(jumps) * normals[:, 2]
        )
        return forward * np.exp(log_return)

    return np.concatenate(run_blocks(simulate, n_paths, threads=threads))


def simulate_basket_paths(
    forwards,
    vols,
    correlation,
    jump_params,
    maturity,
    n_paths,
    seed,
    jump_sizes=None,
    threads=1,
):
    """Exact joint terminal samples with one Poisson process for all assets.

    Diffusion normals and jump normals are both correlated with
    ``correlation``.

    :param jump_sizes: Per asset jump sizes, by default scaled from the
        asset vols.
    :return: Array of shape ``(n_paths, N)``.
    """
    forwards = np.asarray(forwards, dtype=float)
    vols = np.asarray(vols, dtype=float)
    size = forwards.size
    if jump_sizes is None:
        jump_sizes = [jump_params.jump_size(vol) for vol in vols]
    jump_sizes = np.asarray(jump_sizes, dtype=float)
    factor = correlation_factor(repair_correlation(correlation))
    mean = jump_params.lambda_ * maturity
    drift = -0.5 * vols ** 2 * maturity - mean * jump_sizes

    def simulate(block, count):
        uniforms = block_uniforms(seed, Stream.basket_paths, block, count, 1 + 2 * size)
        jumps = _jump_counts(uniforms[:, :1], mean)
        normals = norm_ppf(uniforms)
        diffusion = correlated_normals(normals[:, 1 : size + 1], factor)
        jump_noise = correlated_normals(normals[:, size + 1 :], factor)
        log_return = (
            drift
            + vols * np.sqrt(maturity) * diffusion
            + jumps * (np.log1p(jump_sizes) - 0.5 * jump_params.delta ** 2)
            + jump_params.delta * np.sqrt(jumps) * jump_noise
        )
        return forwards * np.exp(log_return)

    return np.concatenate(run_blocks(simulate, n_paths, threads=threads))
