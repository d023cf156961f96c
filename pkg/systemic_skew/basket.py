# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Analytic basket pricing.

The basket ``B = sum(alpha_i S_i)`` of jointly lognormal assets is
replaced by a shifted lognormal with the same first three moments.
"""

import logging
from collections import namedtuple

import numpy as np
from scipy.optimize import brentq

from systemic_skew.analytic import bs_call, implied_vol, norm_ppf, validate_inputs
from systemic_skew.errors import MomentFitError, NoSolutionError, ValidationError
from systemic_skew.merton import poisson_terms, term_forward, term_vol
from systemic_skew.sampling import (
    Stream,
    block_uniforms,
    correlated_normals,
    run_blocks,
)
from systemic_skew.utils import correlation_factor

BasketMoments = namedtuple("BasketMoments", ["mean", "variance", "third"])
"""Mean, second and third central moments of a basket."""

ShiftedLognormal = namedtuple(
    "ShiftedLognormal", ["shift", "forward", "total_std", "two_moment"]
)
"""``B = shift + X`` with ``X`` lognormal of mean ``forward`` and log
standard deviation ``total_std``."""

SKEW_TOLERANCE = 1e-12
"""Relative third moment below which the fit falls back to two moments."""


def basket_moments(spec):
    """Exact moments of a lognormal basket.

    With ``w = alpha F`` and ``G = expm1(C)`` for the total log covariance
    ``C``, the variance is ``w G w`` and the third central moment is
    ``3 sum_i w_i (G w)_i**2 + sum_ijk w_i w_j w_k G_ij G_ik G_jk``.

    :param spec: :class:`~systemic_skew.models.BasketSpec`.
    :rtype: :class:`BasketMoments`
    """
    weighted = spec.weights * spec.forwards
    growth = np.expm1(spec.covariance())
    spread = growth @ weighted
    variance = float(weighted @ spread)
    third = 3.0 * float(np.sum(weighted * spread ** 2)) + float(
        np.einsum(
            "i,j,k,ij,ik,jk->",
            weighted,
            weighted,
            weighted,
            growth,
            growth,
            growth,
            optimize=True,
        )
    )
    return BasketMoments(float(np.sum(weighted)), variance, third)


def fit_shifted_lognormal(spec):
    """Match a shifted lognormal to the basket moments.

    The normalised skewness ``g`` solves ``y**3 + 3 y = g`` with
    ``y**2 = exp(s**2) - 1``, hence ``y = 2 sinh(asinh(g / 2) / 3)``. The
    shift may be negative. Without positive skewness the fit falls back to
    an unshifted lognormal.

    :rtype: :class:`ShiftedLognormal`
    :raises MomentFitError: The moments admit no lognormal fit.
    """
    moments = basket_moments(spec)
    if not moments.variance > 0:
        raise MomentFitError(
            "Basket variance {} is not positive.".format(moments.variance)
        )
    std = np.sqrt(moments.variance)
    skewness = moments.third / std ** 3
    if skewness > SKEW_TOLERANCE:
        root = 2.0 * np.sinh(np.arcsinh(0.5 * skewness) / 3.0)
        forward = std / root
        return ShiftedLognormal(
            moments.mean - forward, forward, float(np.sqrt(np.log1p(root ** 2))), False
        )
    if not moments.mean > 0:
        raise MomentFitError(
            "Basket skewness {} is not positive and mean {} is not positive.".format(
                skewness, moments.mean
            )
        )
    logging.warning(
        "Basket skewness {:.3g} is not positive, falling back to a two moment "
        "lognormal fit.".format(skewness)
    )
    total_std = np.sqrt(np.log1p(moments.variance / moments.mean ** 2))
    return ShiftedLognormal(0.0, moments.mean, float(total_std), True)


def tm_pricer(spec, strike):
    """Three moment basket call price.

    Strikes at or below the shift are always exercised and priced at
    ``Df (E[B] - K)``.

    :param spec: :class:`~systemic_skew.models.BasketSpec`.
    :param strike: Strike or array of strikes.
    """
    strike = np.asarray(strike, dtype=float)
    if not np.all(np.isfinite(strike)):
        raise ValidationError("Basket strikes must be finite.")
    mean = spec.forward
    if not np.any(spec.vols > 0):
        price = spec.discount * np.maximum(mean - strike, 0.0)
        return price.item() if price.ndim == 0 else price
    fit = fit_shifted_lognormal(spec)
    shifted = strike - fit.shift
    exercised = shifted <= 0
    price = bs_call(
        fit.forward,
        spec.maturity,
        np.where(exercised, fit.forward, shifted),
        fit.total_std / np.sqrt(spec.maturity),
        spec.discount,
    )
    price = np.where(exercised, spec.discount * (mean - strike), price)
    return price.item() if price.ndim == 0 else price


def tm_put(spec, strike):
    """Three moment basket put price by parity."""
    call = tm_pricer(spec, strike)
    return call - spec.discount * (spec.forward - np.asarray(strike, dtype=float))


def merton_jump_sizes(spec, jump_params, universal_k_hat=None):
    """Per asset jump sizes scaled from one universal jump size."""
    k_hat = jump_params.k_hat if universal_k_hat is None else universal_k_hat
    jump_params = jump_params.replace(k_hat=k_hat)
    return np.array([jump_params.jump_size(vol) for vol in spec.vols])


def merton_basket_call(spec, strike, jump_params, universal_k_hat=None):
    """Basket call under one Poisson jump process shared by all assets.

    Conditional on ``n`` jumps the basket is priced by :func:`tm_pricer`
    with compensated forwards and vols ``sqrt(sigma_i**2 + n delta**2 / T)``.
    Terms are summed in ascending ``n``.

    :param universal_k_hat: Universal jump size, by default
        ``jump_params.k_hat``.
    """
    jump_sizes = merton_jump_sizes(spec, jump_params, universal_k_hat)
    counts, weights = poisson_terms(jump_params.lambda_, spec.maturity)
    total = 0.0
    for jumps, weight in zip(counts, weights):
        term = spec.replace(
            forwards=term_forward(
                spec.forwards, spec.maturity, jump_params, jump_sizes, jumps
            ),
            vols=term_vol(spec.vols, spec.maturity, jump_params, jumps),
        )
        total = total + weight * tm_pricer(term, strike)
    return total


def flat_correlation(size, rho):
    """Correlation matrix with the same correlation for every pair."""
    matrix = np.full((size, size), float(rho))
    np.fill_diagonal(matrix, 1.0)
    return matrix


def implied_correlation(price, spec, strike):
    """Flat correlation reproducing a basket call price.

    :param price: Basket call price.
    :param spec: Basket whose vols are the component implied vols.
    :raises NoSolutionError: No correlation in the admissible range
        reproduces the price.
    """
    if spec.size < 2:
        raise ValidationError("Implied correlation needs at least two assets.")
    lowest = -0.999 / (spec.size - 1)

    def mismatch(rho):
        term = spec.replace(correlation=flat_correlation(spec.size, rho))
        return tm_pricer(term, strike) - price

    low, high = mismatch(lowest), mismatch(1.0)
    if low > 0:
        raise NoSolutionError(
            "Basket price {} is below the lowest correlation price.".format(price),
            bound="lower",
        )
    if high < 0:
        raise NoSolutionError(
            "Basket price {} is above the perfect correlation price.".format(price),
            bound="upper",
        )
    return brentq(mismatch, lowest, 1.0, xtol=1e-14)


def basket_implied_vol(price, spec, strike):
    """Black-Scholes implied vol of a basket call on the basket forward."""
    validate_inputs(spec.forward, spec.maturity, strike, spec.discount)
    return implied_vol(price, spec.forward, spec.maturity, strike, spec.discount)


def simulate_lognormal_basket(spec, n_paths, seed, threads=1):
    """Joint lognormal terminal samples of the basket assets.

    :return: Array of shape ``(n_paths, N)``.
    """
    factor = correlation_factor(spec.correlation)
    drift = -0.5 * spec.vols ** 2 * spec.maturity
    scale = spec.vols * np.sqrt(spec.maturity)

    def simulate(block, size):
        uniforms = block_uniforms(seed, Stream.lognormal_basket, block, size, spec.size)
        normals = correlated_normals(norm_ppf(uniforms), factor)
        return spec.forwards * np.exp(drift + scale * normals)

    return np.concatenate(run_blocks(simulate, n_paths, threads=threads))
