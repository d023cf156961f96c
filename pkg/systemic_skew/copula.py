# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Gaussian copula Monte Carlo basket pricing.

Correlated normals are mapped to uniforms and pushed through the inverse
marginal distributions of the assets. With jumps, every jump count gets
its own conditional marginals while all counts share the same uniforms.
"""

import dataclasses
import logging
from collections import namedtuple

import numpy as np

from systemic_skew.analytic import implied_vol, norm_cdf, norm_ppf
from systemic_skew.errors import NoSolutionError, ValidationError
from systemic_skew.merton import marginal_distribution, poisson_terms
from systemic_skew.sampling import (
    Stream,
    block_uniforms,
    correlated_normals,
    run_blocks,
)
from systemic_skew.utils import correlation_factor, repair_correlation

ImpliedVolCurve = namedtuple("ImpliedVolCurve", ["strikes", "vols", "omitted"])
"""Implied vols per strike; omitted strikes carry ``nan``."""


@dataclasses.dataclass
class CopulaResult:
    """Monte Carlo basket prices.

    ``terms`` holds the discounted price conditional on each jump count,
    one row per count, before the Poisson weighting.
    """

    strikes: np.ndarray
    prices: np.ndarray
    std_errors: np.ndarray
    n_paths: int
    clamped: int = 0
    terms: np.ndarray = None
    jump_counts: np.ndarray = None
    jump_weights: np.ndarray = None

    def price(self, index=0):
        """``(price, std_error)`` at one strike."""
        return float(self.prices[index]), float(self.std_errors[index])


def _check_marginals(marginals, weights):
    if len(marginals) != len(weights):
        raise ValidationError(
            "Basket has {} marginals but {} weights.".format(
                len(marginals), len(weights)
            )
        )
    maturities = {m.maturity for m in marginals}
    if len(maturities) != 1:
        raise ValidationError(
            "Basket marginals have different maturities: {}.".format(
                sorted(maturities)
            )
        )


def _simulate(
    term_marginals, term_weights, weights, strikes, correlation, mc, discount
):
    """Price all jump terms on common uniforms."""
    weights = np.asarray(weights, dtype=float)
    size = weights.size
    factor = correlation_factor(repair_correlation(correlation))
    if factor.shape != (size, size):
        raise ValidationError(
            "Basket has {} assets but a {} correlation matrix.".format(
                size, np.shape(correlation)
            )
        )
    n_terms = len(term_marginals)

    def run(block, count):
        uniforms = block_uniforms(
            mc.seed, Stream.copula, block, count, size, mc.antithetic
        )
        uniforms = norm_cdf(correlated_normals(norm_ppf(uniforms), factor))
        mixture = np.zeros((count, strikes.size))
        term_sums = np.zeros((n_terms, strikes.size))
        clamped = 0
        for term, marginals in enumerate(term_marginals):
            spots = np.empty((count, size))
            for asset, marginal in enumerate(marginals):
                spots[:, asset], outside = marginal.quantile(
                    uniforms[:, asset], return_clamped=True
                )
                clamped += outside
            payoff = np.maximum(
                (spots @ weights)[:, np.newaxis] - strikes[np.newaxis, :], 0.0
            )
            term_sums[term] = payoff.sum(axis=0)
            mixture += term_weights[term] * payoff
        if mc.antithetic:
            half = count // 2
            units = 0.5 * (mixture[:half] + mixture[half:])
        else:
            units = mixture
        return (
            mixture.sum(axis=0),
            (units ** 2).sum(axis=0),
            units.sum(axis=0),
            units.shape[0],
            term_sums,
            clamped,
        )

    results = run_blocks(run, mc.n_paths, mc.blocks_per_batch, mc.threads)
    total = np.zeros(strikes.size)
    unit_sum = np.zeros(strikes.size)
    unit_squares = np.zeros(strikes.size)
    term_total = np.zeros((n_terms, strikes.size))
    n_units = 0
    clamped = 0
    for block_sum, block_squares, block_units, count, block_terms, outside in results:
        total += block_sum
        unit_squares += block_squares
        unit_sum += block_units
        term_total += block_terms
        n_units += count
        clamped += outside
    mean = unit_sum / n_units
    variance = np.maximum(unit_squares / n_units - mean ** 2, 0.0)
    variance *= n_units / max(n_units - 1, 1)
    if clamped:
        logging.warning(
            "{} copula quantile(s) clamped to the marginal grids.".format(clamped)
        )
    return CopulaResult(
        strikes=strikes,
        prices=discount * total / mc.n_paths,
        std_errors=discount * np.sqrt(variance / n_units),
        n_paths=mc.n_paths,
        clamped=clamped,
        terms=discount * term_total / mc.n_paths,
    )


def basket_copula_pricer(marginals, weights, strike, rho_diffusive, mc, discount=1.0):
    """Gaussian copula price of a basket call.

    :param marginals: One :class:`~systemic_skew.models.MarginalDistribution`
        per asset, all at the same maturity.
    :param weights: Basket weights.
    :param strike: Strike or array of strikes, priced on the same paths.
    :param rho_diffusive: Correlation matrix of the copula.
    :param mc: :class:`~systemic_skew.models.McConfig`.
    :param discount: Discount factor.
    :rtype: :class:`CopulaResult`
    """
    _check_marginals(marginals, weights)
    strikes = np.atleast_1d(np.asarray(strike, dtype=float))
    return _simulate([marginals], [1.0], weights, strikes, rho_diffusive, mc, discount)


def merton_copula_basket(
    curves,
    forwards,
    weights,
    strike,
    rho_diffusive,
    jump_params,
    mc,
    maturity,
    discount=1.0,
    asset_ids=None,
):
    """Basket call under shared jumps and skew-consistent marginals.

    Sums Poisson weighted copula prices over the jump count. The marginals
    conditional on ``n`` jumps are rebuilt from each diffusive vol curve,
    and every count is priced on the same uniforms.

    :param curves: :class:`~systemic_skew.models.DiffusiveVolCurve` per
        asset.
    :param forwards: Asset forwards.
    :rtype: :class:`CopulaResult` with per count prices in ``terms``.
    """
    if not len(curves) == len(forwards) == len(weights):
        raise ValidationError(
            "Basket needs one curve, forward and weight per asset, got {}, {} "
            "and {}.".format(len(curves), len(forwards), len(weights))
        )
    asset_ids = asset_ids or [None] * len(curves)
    strikes = np.atleast_1d(np.asarray(strike, dtype=float))
    counts, poisson_weights = poisson_terms(jump_params.lambda_, maturity)
    term_marginals = [
        [
            marginal_distribution(
                forward,
                maturity,
                curve,
                discount,
                jump_params,
                jumps=jumps,
                asset_id=asset_id,
            )
            for curve, forward, asset_id in zip(curves, forwards, asset_ids)
        ]
        for jumps in counts
    ]
    result = _simulate(
        term_marginals,
        poisson_weights,
        weights,
        strikes,
        rho_diffusive,
        mc,
        discount,
    )
    result.jump_counts = counts
    result.jump_weights = poisson_weights
    return result


def implied_basket_vol_curve(prices, strikes, basket_forward, discount, maturity):
    """Implied vols of basket call prices on the basket forward.

    Strikes whose price violates the arbitrage bounds are omitted.

    :rtype: :class:`ImpliedVolCurve`
    """
    strikes = np.atleast_1d(np.asarray(strikes, dtype=float))
    prices = np.atleast_1d(np.asarray(prices, dtype=float))
    vols = np.full(strikes.size, np.nan)
    omitted = []
    for index, (price, strike) in enumerate(zip(prices, strikes)):
        try:
            vols[index] = implied_vol(price, basket_forward, maturity, strike, discount)
        except NoSolutionError as error:
            omitted.append(float(strike))
            logging.debug(str(error))
    if omitted:
        logging.warning(
            "Omitted {} strike(s) with prices outside of the arbitrage bounds: "
            "{}.".format(len(omitted), omitted)
        )
    return ImpliedVolCurve(strikes, vols, omitted)
