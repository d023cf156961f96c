# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Black-Scholes building blocks on forwards.

All prices are undiscounted forward formulas multiplied by a discount
factor ``Df``. Functions broadcast over numpy arrays of strikes and vols.
"""

import math

import numpy as np
from scipy.special import ndtr, ndtri

from systemic_skew.config import IMPLIED_VOL_BRACKET, IMPLIED_VOL_MAX_ITERATIONS
from systemic_skew.errors import NoSolutionError, NumericalError, ValidationError

TINY_STD = 1e-14
"""Total standard deviations below this are priced at intrinsic value."""

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def norm_cdf(x):
    """Standard normal distribution function."""
    return ndtr(x)


def norm_ppf(p):
    """Inverse of the standard normal distribution function."""
    return ndtri(p)


def norm_pdf(x):
    """Standard normal density."""
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI


def validate_inputs(forward, maturity, strike, discount, vol=None):
    """Raise :class:`ValidationError` for inputs outside the pricing domain."""
    checks = [
        ("forward", forward, lambda v: v > 0, "positive"),
        ("strike", strike, lambda v: v > 0, "positive"),
        ("maturity", maturity, lambda v: v > 0, "positive"),
        ("discount factor", discount, lambda v: (v > 0) & (v <= 1), "in (0, 1]"),
    ]
    if vol is not None:
        checks.append(("vol", vol, lambda v: v >= 0, "nonnegative"))
    for name, value, predicate, expected in checks:
        value = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(value)) or not np.all(predicate(value)):
            raise ValidationError(
                "The {} must be finite and {}, got {}.".format(name, expected, value)
            )


def _total_std(maturity, vol):
    return np.asarray(vol, dtype=float) * np.sqrt(maturity)


def _d1_d2(forward, strike, std):
    """Return ``d1, d2`` with ``std`` replaced by one where it is degenerate."""
    safe_std = np.where(std > TINY_STD, std, 1.0)
    d1 = (np.log(forward / strike) + 0.5 * safe_std ** 2) / safe_std
    return d1, d1 - safe_std


def _result(value):
    return value.item() if np.ndim(value) == 0 else value


def bs_call(forward, maturity, strike, vol, discount=1.0):
    """Black-Scholes call on a forward.

    :param forward: Forward price ``F``.
    :param maturity: Time to maturity ``T`` in years.
    :param strike: Strike ``K``.
    :param vol: Annualised volatility.
    :param discount: Discount factor ``Df`` in (0, 1].
    :return: ``Df * (F N(d1) - K N(d2))``, intrinsic value when the total
        standard deviation vanishes.
    """
    validate_inputs(forward, maturity, strike, discount, vol)
    forward, strike = np.asarray(forward, float), np.asarray(strike, float)
    std = _total_std(maturity, vol)
    d1, d2 = _d1_d2(forward, strike, std)
    price = forward * ndtr(d1) - strike * ndtr(d2)
    intrinsic = np.maximum(forward - strike, 0.0)
    return _result(discount * np.where(std > TINY_STD, price, intrinsic))


def bs_put(forward, maturity, strike, vol, discount=1.0):
    """Black-Scholes put on a forward, ``Df * (K N(-d2) - F N(-d1))``."""
    validate_inputs(forward, maturity, strike, discount, vol)
    forward, strike = np.asarray(forward, float), np.asarray(strike, float)
    std = _total_std(maturity, vol)
    d1, d2 = _d1_d2(forward, strike, std)
    price = strike * ndtr(-d2) - forward * ndtr(-d1)
    intrinsic = np.maximum(strike - forward, 0.0)
    return _result(discount * np.where(std > TINY_STD, price, intrinsic))


def bs_digital_put(forward, maturity, strike, vol, discount=1.0):
    """Digital put paying one unit when the terminal price ends below strike.

    Returns ``Df * N(-d2)``. Without diffusion the payoff is certain (``K > F``),
    impossible (``K < F``) or one half at the money.
    """
    validate_inputs(forward, maturity, strike, discount, vol)
    forward, strike = np.asarray(forward, float), np.asarray(strike, float)
    std = _total_std(maturity, vol)
    _, d2 = _d1_d2(forward, strike, std)
    degenerate = np.where(strike > forward, 1.0, np.where(strike < forward, 0.0, 0.5))
    return _result(discount * np.where(std > TINY_STD, ndtr(-d2), degenerate))


def bs_vega(forward, maturity, strike, vol, discount=1.0):
    """Sensitivity of :func:`bs_call` to the volatility."""
    validate_inputs(forward, maturity, strike, discount, vol)
    forward, strike = np.asarray(forward, float), np.asarray(strike, float)
    std = _total_std(maturity, vol)
    d1, _ = _d1_d2(forward, strike, std)
    vega = discount * forward * norm_pdf(d1) * math.sqrt(maturity)
    return _result(np.where(std > TINY_STD, vega, 0.0))


def implied_vol(price, forward, maturity, strike, discount=1.0, bracket=None):
    """Black-Scholes implied volatility of a call price.

    Bracketed safeguarded Newton iteration: a Newton step is taken whenever
    it stays inside the current bracket, bisection otherwise.

    :param price: Discounted call price, strictly between
        ``Df * max(F - K, 0)`` and ``Df * F``.
    :param bracket: Initial ``(low, high)`` vol bracket, widened when needed.
    :return: Implied volatility.
    :raises NoSolutionError: The price violates an arbitrage bound.
    """
    validate_inputs(forward, maturity, strike, discount)
    price = float(price)
    lower = discount * max(forward - strike, 0.0)
    upper = discount * forward
    if not price > lower:
        raise NoSolutionError(
            "Call price {} is not above the lower arbitrage bound {} "
            "(F={}, K={}, T={}).".format(price, lower, forward, strike, maturity),
            bound="lower",
        )
    if not price < upper:
        raise NoSolutionError(
            "Call price {} is not below the upper arbitrage bound {} "
            "(F={}, K={}, T={}).".format(price, upper, forward, strike, maturity),
            bound="upper",
        )

    low, high = bracket or IMPLIED_VOL_BRACKET

    def objective(vol):
        return bs_call(forward, maturity, strike, vol, discount) - price

    if objective(low) > 0:
        low = 0.0
    while objective(high) < 0:
        high *= 2.0
        if high > 1e3:
            raise NumericalError(
                "Implied vol of price {} exceeds {} (F={}, K={}, T={}).".format(
                    price, high, forward, strike, maturity
                )
            )

    vol = 0.5 * (low + high)
    price_tolerance = 1e-14 * forward
    for _ in range(IMPLIED_VOL_MAX_ITERATIONS):
        diff = objective(vol)
        if abs(diff) <= price_tolerance:
            return vol
        if diff > 0:
            high = vol
        else:
            low = vol
        vega = bs_vega(forward, maturity, strike, vol, discount)
        step = diff / vega if vega > 0 else np.inf
        candidate = vol - step
        if not low < candidate < high:
            candidate = 0.5 * (low + high)
        if abs(candidate - vol) <= 1e-15 * max(1.0, vol):
            return candidate
        vol = candidate
    if high - low <= 1e-12:
        return vol
    raise NumericalError(
        "Implied vol did not converge for price {} (F={}, K={}, T={}).".format(
            price, forward, strike, maturity
        )
    )
