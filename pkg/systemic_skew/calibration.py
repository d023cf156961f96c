# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Calibration of diffusive vols and of the systemic jump tuple."""

import dataclasses
import logging
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from typing import Tuple

import numpy as np
from scipy.optimize import brentq, minimize

from systemic_skew.analytic import implied_vol
from systemic_skew.config import (
    CALIBRATION_MAX_EVALUATIONS,
    CALIBRATION_RESTARTS,
    DEFAULT_SEARCH_SPACE,
    DEFAULT_SIGMA0,
    FIXED_POINT_MAX_ITERATIONS,
    FIXED_POINT_TOLERANCE,
)
from systemic_skew.copula import implied_basket_vol_curve, merton_copula_basket
from systemic_skew.errors import (
    ConvergenceError,
    InfeasibleCorrelationError,
    NegativeVolError,
    NumericalError,
    ValidationError,
)
from systemic_skew.merton import merton_call_extended
from systemic_skew.models import (
    CalibrationReport,
    DiffusiveVolCurve,
    InterpolationRule,
    JumpParams,
    VolSurfaceSlice,
)
from systemic_skew.utils import repair_correlation

PENALTY = 10.0
"""Objective value of trial tuples the model cannot price."""

MATURITY_TOLERANCE = 1e-12

BasketSkew = namedtuple(
    "BasketSkew", ["curve", "result", "component_curves", "rho_diffusive"]
)
"""Model basket implied vols with the pieces they were computed from."""


def model_vols(slice_, curve, jump_params):
    """Implied vols of extended Merton prices at the quoted strikes."""
    strikes = np.array(slice_.strikes)
    prices = np.atleast_1d(
        merton_call_extended(
            slice_.forward,
            slice_.maturity,
            strikes,
            curve,
            slice_.discount,
            jump_params,
        )
    )
    return np.array(
        [
            implied_vol(price, slice_.forward, slice_.maturity, strike, slice_.discount)
            for price, strike in zip(prices, strikes)
        ]
    )


def fixed_point_diffusive_vol(
    slice_,
    jump_params,
    tolerance=FIXED_POINT_TOLERANCE,
    max_iterations=FIXED_POINT_MAX_ITERATIONS,
    interpolation=InterpolationRule.pchip,
):
    """Diffusive vol curve that reprices a market slice under jumps.

    Starts from the constant ATM market vol and adds the mismatch between
    market and model implied vols at every quoted strike.

    :param slice_: :class:`~systemic_skew.models.VolSurfaceSlice`.
    :param jump_params: :class:`~systemic_skew.models.JumpParams`.
    :return: Tuple of the curve and its
        :class:`~systemic_skew.models.CalibrationReport`.
    :raises ConvergenceError: Mismatch still above tolerance after
        ``max_iterations`` updates.
    :raises NegativeVolError: An update produced a nonpositive vol.
    """
    strikes = np.array(slice_.strikes)
    market = np.array(slice_.vols)
    vols = np.full(strikes.size, slice_.atm_vol())
    report = CalibrationReport()
    while True:
        curve = DiffusiveVolCurve(strikes, vols, interpolation)
        report.curve = curve
        mismatch = market - model_vols(slice_, curve, jump_params)
        residual = float(np.max(np.abs(mismatch)))
        if report.mismatches and residual > report.mismatches[-1]:
            report.oscillation = True
            logging.warning(
                "Fixed point for {} T={} oscillates: mismatch {:.3g} after "
                "{:.3g}.".format(
                    slice_.asset_id, slice_.maturity, residual, report.mismatches[-1]
                )
            )
        report.mismatches.append(residual)
        if residual <= tolerance:
            report.converged = True
            return curve, report
        if report.iterations >= max_iterations:
            report.message = (
                "Fixed point for {} T={} did not converge in {} iterations, "
                "mismatch {:.3g}.".format(
                    slice_.asset_id, slice_.maturity, max_iterations, residual
                )
            )
            raise ConvergenceError(report.message, report)
        vols = vols + mismatch
        report.iterations += 1
        if np.any(vols <= 0):
            report.message = (
                "Fixed point for {} T={} produced nonpositive vols at strikes {}; "
                "jump parameters {} are too aggressive.".format(
                    slice_.asset_id,
                    slice_.maturity,
                    strikes[vols <= 0].tolist(),
                    jump_params.to_dict(),
                )
            )
            raise NegativeVolError(report.message, report)


def total_correlation(rho_diffusive, jump_params, k_i, k_j):
    """Correlation of returns under diffusion plus one shared jump process.

    ``(rho + lambda k_i k_j) / sqrt((1 + lambda k_i**2) (1 + lambda k_j**2))``
    """
    rho_diffusive = np.asarray(rho_diffusive, dtype=float)
    if np.any(np.abs(rho_diffusive) > 1 + 1e-12):
        raise ValidationError(
            "Diffusive correlation must lie in [-1, 1], got {}.".format(rho_diffusive)
        )
    lambda_ = jump_params.lambda_
    value = (rho_diffusive + lambda_ * k_i * k_j) / np.sqrt(
        (1.0 + lambda_ * k_i ** 2) * (1.0 + lambda_ * k_j ** 2)
    )
    value = np.clip(value, -1.0, 1.0)
    return value.item() if np.ndim(value) == 0 else value


def required_diffusive_correlation(rho_total, lambda_, k_i, k_j):
    """Diffusive correlation giving ``rho_total``, unbounded."""
    return rho_total * np.sqrt(
        (1.0 + lambda_ * k_i ** 2) * (1.0 + lambda_ * k_j ** 2)
    ) - lambda_ * k_i * k_j


def feasible_lambda_range(rho_total, k_i, k_j):
    """Intensities for which a total correlation remains attainable.

    :return: ``(0, lambda_max)``; ``lambda_max`` is infinite when every
        intensity works.
    """

    def excess(lambda_):
        return abs(required_diffusive_correlation(rho_total, lambda_, k_i, k_j)) - 1.0

    high = 1.0
    while excess(high) <= 0:
        high *= 2.0
        if high > 1e12:
            return 0.0, float("inf")
    low = 0.0 if high == 1.0 else 0.5 * high
    return 0.0, brentq(excess, low, high, xtol=1e-12)


def diffusive_correlation_for_target(rho_total, jump_params, k_i, k_j):
    """Diffusive correlation that yields a total correlation target.

    :raises InfeasibleCorrelationError: The required diffusive correlation
        lies outside of [-1, 1].
    """
    if abs(rho_total) > 1:
        raise ValidationError(
            "Total correlation must lie in [-1, 1], got {}.".format(rho_total)
        )
    value = required_diffusive_correlation(rho_total, jump_params.lambda_, k_i, k_j)
    if abs(value) > 1 + 1e-12:
        feasible = feasible_lambda_range(rho_total, k_i, k_j)
        raise InfeasibleCorrelationError(
            "Total correlation {} needs diffusive correlation {:.6g} at lambda={} "
            "(k_i={}, k_j={}); feasible lambda range is [{}, {:.6g}].".format(
                rho_total,
                value,
                jump_params.lambda_,
                k_i,
                k_j,
                feasible[0],
                feasible[1],
            ),
            feasible_lambda=feasible,
        )
    return float(np.clip(value, -1.0, 1.0))


def diffusive_correlation_matrix(rho_total, jump_params, jump_sizes, labels=None):
    """Invert a total correlation matrix pair by pair.

    :param jump_sizes: Per asset jump sizes entering the inversion.
    :param labels: Asset ids used in error messages.
    :return: Repaired diffusive correlation matrix.
    """
    rho_total = np.asarray(rho_total, dtype=float)
    size = len(jump_sizes)
    labels = labels or list(range(size))
    result = np.eye(size)
    for i in range(size):
        for j in range(i + 1, size):
            try:
                value = diffusive_correlation_for_target(
                    rho_total[i, j], jump_params, jump_sizes[i], jump_sizes[j]
                )
            except InfeasibleCorrelationError as error:
                raise InfeasibleCorrelationError(
                    "Pair ({}, {}): {}".format(labels[i], labels[j], error),
                    feasible_lambda=error.feasible_lambda,
                )
            result[i, j] = result[j, i] = value
    return repair_correlation(result)


def _common_maturity(slices):
    maturity = slices[0].maturity
    for slice_ in slices:
        if abs(slice_.maturity - maturity) > MATURITY_TOLERANCE:
            raise ValidationError(
                "Slice {} has maturity {} instead of {}.".format(
                    slice_.asset_id, slice_.maturity, maturity
                )
            )
    return maturity


def _map(func, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(func, items))
    return [func(item) for item in items]


def basket_skew_model(
    component_slices,
    weights,
    rho_total,
    jump_params,
    mc,
    strikes,
    threads=1,
    tolerance=FIXED_POINT_TOLERANCE,
):
    """Model basket implied vols for a trial jump tuple.

    Solves the diffusive vol curve of every component, converts the total
    correlations into diffusive ones with jump sizes in units of each
    asset's ATM diffusive vol, and prices the basket with the jump copula.

    :param strikes: Absolute basket strikes.
    :param tolerance: Fixed-point tolerance of the component curves.
    :rtype: :class:`BasketSkew`
    """
    maturity = _common_maturity(component_slices)
    discount = component_slices[0].discount
    curves = _map(
        lambda slice_: fixed_point_diffusive_vol(slice_, jump_params, tolerance)[0],
        component_slices,
        threads,
    )
    forwards = np.array([slice_.forward for slice_ in component_slices])
    atm_vols = np.array([curve(forward) for curve, forward in zip(curves, forwards)])
    jump_sizes = np.array([jump_params.jump_size(vol) for vol in atm_vols])
    labels = [slice_.asset_id for slice_ in component_slices]
    rho_diffusive = diffusive_correlation_matrix(
        rho_total, jump_params, jump_sizes / atm_vols, labels
    )
    result = merton_copula_basket(
        curves,
        forwards,
        weights,
        strikes,
        rho_diffusive,
        jump_params,
        mc,
        maturity,
        discount,
        asset_ids=labels,
    )
    basket_forward = float(np.dot(weights, forwards))
    curve = implied_basket_vol_curve(
        result.prices, strikes, basket_forward, discount, maturity
    )
    return BasketSkew(curve, result, curves, rho_diffusive)


def model_slice(asset_id, forward, maturity, discount, curve, jump_params, strikes):
    """Slice of extended Merton implied vols, a synthetic market."""
    slice_ = VolSurfaceSlice(
        asset_id, maturity, forward, discount, strikes, [0.2] * len(strikes)
    )
    return slice_.with_vols(model_vols(slice_, curve, jump_params))


def model_index_slice(
    component_slices,
    weights,
    rho_total,
    jump_params,
    mc,
    moneyness,
    asset_id="INDEX",
    threads=1,
    tolerance=FIXED_POINT_TOLERANCE,
):
    """Index slice generated by the basket model, a synthetic target."""
    forward = float(
        np.dot(weights, [slice_.forward for slice_ in component_slices])
    )
    strikes = np.asarray(moneyness, dtype=float) * forward
    skew = basket_skew_model(
        component_slices,
        weights,
        rho_total,
        jump_params,
        mc,
        strikes,
        threads,
        tolerance,
    )
    if skew.curve.omitted:
        raise NumericalError(
            "Model index prices violate arbitrage bounds at strikes {}.".format(
                skew.curve.omitted
            )
        )
    return VolSurfaceSlice(
        asset_id,
        component_slices[0].maturity,
        forward,
        component_slices[0].discount,
        strikes,
        skew.curve.vols,
    )


@dataclasses.dataclass(frozen=True)
class SearchSpace:
    """Box of the jump tuple calibration; ``sigma0`` stays fixed."""

    lambda_: Tuple[float, float] = DEFAULT_SEARCH_SPACE["lambda_"]
    k_hat: Tuple[float, float] = DEFAULT_SEARCH_SPACE["k_hat"]
    delta: Tuple[float, float] = DEFAULT_SEARCH_SPACE["delta"]
    kappa: Tuple[float, float] = DEFAULT_SEARCH_SPACE["kappa"]
    sigma0: float = DEFAULT_SIGMA0

    names = ("lambda_", "k_hat", "delta", "kappa")

    def __post_init__(self):
        """Validate the box."""
        for name in self.names:
            low, high = getattr(self, name)
            if not low <= high:
                raise ValidationError(
                    "Search range of {} is empty: [{}, {}].".format(name, low, high)
                )
        for point in (self.lows, self.highs):
            self.to_params(point)

    @classmethod
    def point(cls, jump_params):
        """Box collapsed to a single tuple."""
        return cls(
            **{
                name: (getattr(jump_params, name),) * 2
                for name in ("lambda_", "k_hat", "delta", "kappa")
            },
            sigma0=jump_params.sigma0,
        )

    @property
    def lows(self):
        """Lower corner."""
        return np.array([getattr(self, name)[0] for name in self.names])

    @property
    def highs(self):
        """Upper corner."""
        return np.array([getattr(self, name)[1] for name in self.names])

    @property
    def free(self):
        """Indices of the dimensions that are not collapsed."""
        return np.flatnonzero(self.highs > self.lows)

    def is_point(self):
        """Whether every dimension is collapsed."""
        return self.free.size == 0

    def center(self):
        """Center of the box."""
        return 0.5 * (self.lows + self.highs)

    def starting_points(self, count):
        """Deterministic restart points, the center first."""
        fractions = [0.5, 0.25, 0.75, 0.125, 0.875]
        fractions += [0.5] * max(0, count - len(fractions))
        return [self.lows + f * (self.highs - self.lows) for f in fractions[:count]]

    def to_params(self, point):
        """Jump tuple of a point of the box."""
        point = np.clip(point, self.lows, self.highs)
        return JumpParams(
            lambda_=float(point[0]),
            k_hat=float(point[1]),
            delta=float(point[2]),
            sigma0=self.sigma0,
            kappa=float(point[3]),
        )


def _check_box_feasible(space, component_slices, rho_total):
    """Raise when the largest intensity of the box breaks a correlation pair."""
    rho_total = np.asarray(rho_total, dtype=float)
    vols = [slice_.atm_vol() for slice_ in component_slices]
    lambda_ = space.lambda_[1]
    for k_hat in sorted(set(space.k_hat)):
        for kappa in sorted(set(space.kappa)):
            params = JumpParams(lambda_, k_hat, space.delta[0], space.sigma0, kappa)
            try:
                sizes = [params.jump_size(vol) / vol for vol in vols]
            except ValidationError:
                # jumps of -100% or worse, rejected by the objective instead
                continue
            for i in range(len(vols)):
                for j in range(i + 1, len(vols)):
                    required = required_diffusive_correlation(
                        rho_total[i, j], lambda_, sizes[i], sizes[j]
                    )
                    if abs(required) > 1 + 1e-12:
                        feasible = feasible_lambda_range(
                            rho_total[i, j], sizes[i], sizes[j]
                        )
                        raise InfeasibleCorrelationError(
                            "Total correlation {} of ({}, {}) is infeasible at "
                            "lambda={} (k_hat={}, kappa={}); feasible lambda range "
                            "is [{}, {:.6g}].".format(
                                rho_total[i, j],
                                component_slices[i].asset_id,
                                component_slices[j].asset_id,
                                lambda_,
                                k_hat,
                                kappa,
                                feasible[0],
                                feasible[1],
                            ),
                            feasible_lambda=feasible,
                        )


def _initial_simplex(start, lows, highs):
    simplex = [start]
    for dim in range(start.size):
        vertex = start.copy()
        step = 0.1 * (highs[dim] - lows[dim])
        if start[dim] + step <= highs[dim]:
            vertex[dim] += step
        else:
            vertex[dim] -= step
        simplex.append(vertex)
    return np.array(simplex)


def calibrate_jump_tuple(
    index_slice,
    component_slices,
    weights,
    rho_total,
    search_space=None,
    mc=None,
    threads=1,
    restarts=CALIBRATION_RESTARTS,
    max_evaluations=CALIBRATION_MAX_EVALUATIONS,
    tolerance=FIXED_POINT_TOLERANCE,
):
    """Jump tuple reconciling an index skew with its component skews.

    Minimises the sum of squared differences between model basket and
    index implied vols over the search box with restarted Nelder-Mead.
    Every trial tuple re-solves the component fixed points and re-derives
    the diffusive correlations; the copula uses the fixed seed of ``mc``.

    :param index_slice: Target index :class:`~systemic_skew.models.VolSurfaceSlice`.
    :param component_slices: Component slices at the same maturity.
    :param weights: Basket weights of the components.
    :param rho_total: Total correlation matrix of the components.
    :param search_space: :class:`SearchSpace`, default box when omitted.
    :param mc: :class:`~systemic_skew.models.McConfig`, mandatory.
    :param tolerance: Fixed-point tolerance of the component curves.
    :return: Best tuple and its :class:`~systemic_skew.models.CalibrationReport`;
        ``converged`` is false when every restart stalled.
    :raises InfeasibleCorrelationError: The box contains intensities for
        which some total correlation cannot be matched.
    """
    if mc is None:
        raise ValidationError("Tuple calibration needs a Monte Carlo seed.")
    weights = np.asarray(weights, dtype=float)
    if weights.size != len(component_slices):
        raise ValidationError(
            "Got {} weights for {} components.".format(
                weights.size, len(component_slices)
            )
        )
    _common_maturity([index_slice] + list(component_slices))
    space = search_space or SearchSpace()
    _check_box_feasible(space, component_slices, rho_total)

    basket_forward = float(np.dot(weights, [s.forward for s in component_slices]))
    strikes = np.array(index_slice.strikes) / index_slice.forward * basket_forward
    target = np.array(index_slice.vols)
    cache = {}
    report = CalibrationReport()

    def evaluate(point):
        key = tuple(np.round(point, 14))
        if key in cache:
            return cache[key]
        jump_params = space.to_params(point)
        try:
            skew = basket_skew_model(
                component_slices,
                weights,
                rho_total,
                jump_params,
                mc,
                strikes,
                threads,
                tolerance,
            )
            diff = skew.curve.vols - target
            value = float(np.nansum(diff ** 2) + np.count_nonzero(np.isnan(diff)))
        except (NumericalError, ConvergenceError, ValidationError) as error:
            logging.debug("Tuple {} rejected: {}".format(jump_params.to_dict(), error))
            value = PENALTY
        cache[key] = value
        report.iterations += 1
        logging.debug("Tuple {} objective {:.6g}".format(jump_params.to_dict(), value))
        return value

    best_point, best_value = space.center(), None
    if space.is_point():
        best_value = evaluate(space.lows)
        best_point = space.lows
        report.mismatches.append(best_value)
        report.converged = best_value < PENALTY
    else:
        free = space.free
        lows, highs = space.lows[free], space.highs[free]

        def objective(values):
            point = space.lows.copy()
            point[free] = np.clip(values, lows, highs)
            return evaluate(point)

        for start in space.starting_points(restarts):
            outcome = minimize(
                objective,
                start[free],
                method="Nelder-Mead",
                bounds=list(zip(lows, highs)),
                options={
                    "maxfev": max_evaluations,
                    "xatol": 1e-4,
                    "fatol": 1e-10,
                    "initial_simplex": _initial_simplex(start[free], lows, highs),
                },
            )
            value = float(outcome.fun)
            report.mismatches.append(value)
            report.converged = report.converged or bool(outcome.success)
            if best_value is None or value < best_value:
                best_value = value
                best_point = space.lows.copy()
                best_point[free] = np.clip(outcome.x, lows, highs)
        report.converged = report.converged and best_value < PENALTY

    jump_params = space.to_params(best_point)
    report.jump_params = jump_params
    report.objective = best_value
    report.message = (
        "Calibrated {} with objective {:.6g} after {} evaluations.".format(
            jump_params.to_dict(), best_value, report.iterations
        )
        if report.converged
        else "Calibration stalled; best tuple {} with objective {:.6g}.".format(
            jump_params.to_dict(), best_value
        )
    )
    return jump_params, report
