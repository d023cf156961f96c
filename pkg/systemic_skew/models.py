# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Models for Systemic-Skew components."""

import dataclasses
import enum
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from systemic_skew.config import (
    DEFAULT_SIGMA0,
    MC_BLOCK_SIZE,
    MC_DEFAULT_BATCH_SIZE,
    MC_DEFAULT_THREADS,
    QUANTILE_CLAMP,
)
from systemic_skew.errors import ValidationError

MC_MIN_PATHS = 1000
"""Smallest number of paths accepted by a Monte Carlo pricing call."""


class InterpolationRule(enum.Enum):
    """Interpolation of a vol curve between grid strikes."""

    pchip = 0
    linear = 1


class ExtrapolationRule(enum.Enum):
    """Extrapolation of a vol curve outside of its strike grid."""

    flat = 0


def _check(condition, message, *args):
    if not condition:
        raise ValidationError(message.format(*args))


@dataclasses.dataclass(frozen=True)
class OptionQuote:
    """European option quote on a forward."""

    forward: float
    strike: float
    maturity: float
    discount_factor: float = 1.0
    implied_vol: float = 0.0

    def __post_init__(self):
        """Validate the quote."""
        self.validate()

    def validate(self):
        """Raise :class:`ValidationError` for an invalid quote."""
        from systemic_skew.analytic import validate_inputs

        validate_inputs(
            self.forward,
            self.maturity,
            self.strike,
            self.discount_factor,
            self.implied_vol,
        )

    def price(self):
        """Black-Scholes call price of the quote."""
        from systemic_skew.analytic import bs_call

        return bs_call(
            self.forward,
            self.maturity,
            self.strike,
            self.implied_vol,
            self.discount_factor,
        )


@dataclasses.dataclass(frozen=True)
class JumpParams:
    """Systemic jump tuple shared by all assets.

    :param lambda_: Jump intensity in jumps per year.
    :param k_hat: Mean proportional jump size, ``k_hat > -1``.
    :param delta: Lognormal jump volatility.
    :param sigma0: Vol scale of the jump-size scaling rule.
    :param kappa: Elasticity of the jump size to the diffusive vol.
    """

    lambda_: float
    k_hat: float
    delta: float
    sigma0: float = DEFAULT_SIGMA0
    kappa: float = 0.0

    def __post_init__(self):
        """Validate the tuple."""
        for name in ("lambda_", "k_hat", "delta", "sigma0", "kappa"):
            _check(
                math.isfinite(getattr(self, name)),
                "Jump parameter {} must be finite, got {}.",
                name,
                getattr(self, name),
            )
        _check(self.lambda_ >= 0, "Jump intensity must be >= 0, got {}.", self.lambda_)
        _check(self.k_hat > -1, "Jump size k_hat must be > -1, got {}.", self.k_hat)
        _check(self.delta >= 0, "Jump vol delta must be >= 0, got {}.", self.delta)
        _check(self.sigma0 > 0, "Vol scale sigma0 must be > 0, got {}.", self.sigma0)
        _check(self.kappa >= 0, "Elasticity kappa must be >= 0, got {}.", self.kappa)

    @classmethod
    def no_jumps(cls, sigma0=DEFAULT_SIGMA0):
        """Tuple without jumps, the Black-Scholes limit."""
        return cls(lambda_=0.0, k_hat=0.0, delta=0.0, sigma0=sigma0)

    def jump_size(self, sigma):
        """Jump size of an asset with diffusive vol ``sigma``."""
        from systemic_skew.merton import scaled_jump_size

        return scaled_jump_size(self.k_hat, sigma, self.sigma0, self.kappa)

    def replace(self, **changes):
        """Copy of the tuple with some fields changed."""
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        """Serialisable representation."""
        return {
            "lambda": self.lambda_,
            "k_hat": self.k_hat,
            "delta": self.delta,
            "sigma0": self.sigma0,
            "kappa": self.kappa,
        }


class DiffusiveVolCurve:
    """Strike-dependent diffusive volatility ``sigma(K)``.

    A curve on a single strike is constant. Outside of its grid the curve
    is extended flat.
    """

    def __init__(
        self,
        strikes,
        vols,
        interpolation=InterpolationRule.pchip,
        extrapolation=ExtrapolationRule.flat,
    ):
        """Initialise the curve on an ascending strike grid."""
        self.strikes = np.array(strikes, dtype=float, ndmin=1)
        self.vols = np.array(vols, dtype=float, ndmin=1)
        self.interpolation = InterpolationRule(interpolation)
        self.extrapolation = ExtrapolationRule(extrapolation)
        _check(
            self.strikes.ndim == 1 and self.strikes.shape == self.vols.shape,
            "Curve needs one vol per strike, got {} strikes and {} vols.",
            self.strikes.size,
            self.vols.size,
        )
        _check(self.strikes.size > 0, "Curve needs at least one strike.")
        _check(
            np.all(np.isfinite(self.strikes)) and np.all(self.strikes > 0),
            "Curve strikes must be finite and positive.",
        )
        _check(
            np.all(np.diff(self.strikes) > 0),
            "Curve strikes must be strictly ascending: {}.",
            self.strikes,
        )
        _check(
            np.all(np.isfinite(self.vols)) and np.all(self.vols > 0),
            "Diffusive vols must be finite and positive: {}.",
            self.vols,
        )
        self.strikes.setflags(write=False)
        self.vols.setflags(write=False)
        self._interpolator = None
        if self.strikes.size > 1 and self.interpolation == InterpolationRule.pchip:
            self._interpolator = PchipInterpolator(
                self.strikes, self.vols, extrapolate=False
            )

    @classmethod
    def constant(cls, vol, strike=1.0):
        """Curve with the same vol at every strike."""
        return cls([strike], [vol])

    @property
    def is_constant(self):
        """Whether the curve has the same vol everywhere."""
        return bool(np.all(self.vols == self.vols[0]))

    def is_extrapolating(self, strike):
        """Mask of the strikes lying outside of the grid."""
        strike = np.asarray(strike, dtype=float)
        if self.strikes.size == 1:
            return np.zeros(strike.shape, dtype=bool)
        return (strike < self.strikes[0]) | (strike > self.strikes[-1])

    def __call__(self, strike):
        """Evaluate the curve, flat outside of the grid."""
        strike = np.asarray(strike, dtype=float)
        if self.strikes.size == 1:
            value = np.full(strike.shape, self.vols[0])
        else:
            clipped = np.clip(strike, self.strikes[0], self.strikes[-1])
            if self._interpolator is not None:
                value = self._interpolator(clipped)
            else:
                value = np.interp(clipped, self.strikes, self.vols)
        return value.item() if value.ndim == 0 else value

    def with_vols(self, vols):
        """Curve on the same grid with other vols."""
        return DiffusiveVolCurve(
            self.strikes, vols, self.interpolation, self.extrapolation
        )

    def to_dict(self):
        """Serialisable representation."""
        return {
            "strikes": self.strikes.tolist(),
            "vols": self.vols.tolist(),
            "interpolation": self.interpolation.name,
            "extrapolation": self.extrapolation.name,
        }

    def __repr__(self):
        """Curve representation."""
        return "<DiffusiveVolCurve {} strikes in [{}, {}]>".format(
            self.strikes.size, self.strikes[0], self.strikes[-1]
        )


@dataclasses.dataclass(frozen=True)
class VolSurfaceSlice:
    """Market implied vols of one asset at one maturity."""

    asset_id: str
    maturity: float
    forward: float
    discount: float
    strikes: Tuple[float, ...]
    vols: Tuple[float, ...]

    def __post_init__(self):
        """Validate the slice and flag butterfly arbitrage."""
        object.__setattr__(self, "strikes", tuple(float(k) for k in self.strikes))
        object.__setattr__(self, "vols", tuple(float(v) for v in self.vols))
        _check(
            len(self.strikes) == len(self.vols),
            "Slice {} T={} has {} strikes but {} vols.",
            self.asset_id,
            self.maturity,
            len(self.strikes),
            len(self.vols),
        )
        _check(
            len(self.strikes) >= 3,
            "Slice {} T={} needs at least 3 quotes, got {}.",
            self.asset_id,
            self.maturity,
            len(self.strikes),
        )
        _check(
            self.forward > 0 and math.isfinite(self.forward),
            "Slice {} forward must be positive, got {}.",
            self.asset_id,
            self.forward,
        )
        _check(
            self.maturity > 0 and math.isfinite(self.maturity),
            "Slice {} maturity must be positive, got {}.",
            self.asset_id,
            self.maturity,
        )
        _check(
            0 < self.discount <= 1,
            "Slice {} discount factor must be in (0, 1], got {}.",
            self.asset_id,
            self.discount,
        )
        strikes = np.array(self.strikes)
        _check(
            np.all(strikes > 0) and np.all(np.diff(strikes) > 0),
            "Slice {} T={} strikes must be positive and strictly ascending.",
            self.asset_id,
            self.maturity,
        )
        for strike, vol in self.quotes:
            _check(
                0 < vol < 3,
                "Slice {} T={} vol {} at strike {} is outside of (0, 3).",
                self.asset_id,
                self.maturity,
                vol,
                strike,
            )
        if not self.is_convex():
            logging.warning(
                "Call prices of {} at T={} are not convex in strike.".format(
                    self.asset_id, self.maturity
                )
            )

    @property
    def quotes(self):
        """List of ``(strike, implied vol)`` pairs."""
        return list(zip(self.strikes, self.vols))

    def call_prices(self):
        """Discounted Black-Scholes call prices of the quotes."""
        from systemic_skew.analytic import bs_call

        return bs_call(
            self.forward,
            self.maturity,
            np.array(self.strikes),
            np.array(self.vols),
            self.discount,
        )

    def is_convex(self):
        """Whether call prices are convex in strike (no butterfly arbitrage)."""
        prices = self.call_prices()
        slopes = np.diff(prices) / np.diff(self.strikes)
        return bool(np.all(np.diff(slopes) >= -1e-12 * self.discount))

    def vol_curve(self):
        """Market vols as a monotone cubic curve, flat outside the quotes."""
        return DiffusiveVolCurve(self.strikes, self.vols)

    def interpolated_vol(self, strike):
        """Market implied vol at arbitrary strikes."""
        return self.vol_curve()(strike)

    def atm_vol(self):
        """Market implied vol at the forward."""
        return self.interpolated_vol(self.forward)

    def with_vols(self, vols):
        """Copy of the slice with other implied vols."""
        return dataclasses.replace(self, vols=tuple(vols))


@dataclasses.dataclass
class BasketSpec:
    """Basket of lognormal assets with fixed weights.

    The correlation matrix is symmetrised and repaired to be positive
    semidefinite on construction.
    """

    asset_ids: Tuple[str, ...]
    weights: np.ndarray
    forwards: np.ndarray
    vols: np.ndarray
    correlation: np.ndarray
    maturity: float
    discount: float = 1.0

    def __post_init__(self):
        """Validate and repair the basket definition."""
        from systemic_skew.utils import repair_correlation

        self.asset_ids = tuple(self.asset_ids)
        self.weights = np.array(self.weights, dtype=float, ndmin=1)
        self.forwards = np.array(self.forwards, dtype=float, ndmin=1)
        self.vols = np.array(self.vols, dtype=float, ndmin=1)
        size = len(self.asset_ids)
        for name in ("weights", "forwards", "vols"):
            _check(
                getattr(self, name).shape == (size,),
                "Basket has {} assets but {} {}.",
                size,
                getattr(self, name).size,
                name,
            )
        _check(
            np.all(np.isfinite(self.weights)) and np.any(self.weights != 0),
            "Basket weights must be finite and not all zero: {}.",
            self.weights,
        )
        _check(
            np.all(np.isfinite(self.forwards)) and np.all(self.forwards > 0),
            "Basket forwards must be positive: {}.",
            self.forwards,
        )
        _check(
            np.all(np.isfinite(self.vols)) and np.all(self.vols >= 0),
            "Basket vols must be nonnegative: {}.",
            self.vols,
        )
        _check(self.maturity > 0, "Basket maturity must be positive.")
        _check(0 < self.discount <= 1, "Basket discount must be in (0, 1].")
        self.correlation = repair_correlation(self.correlation)
        _check(
            self.correlation.shape == (size, size),
            "Basket has {} assets but a {} correlation matrix.",
            size,
            self.correlation.shape,
        )

    @property
    def size(self):
        """Number of assets."""
        return len(self.asset_ids)

    @property
    def forward(self):
        """Basket forward ``sum(alpha_i F_i)``."""
        return float(np.dot(self.weights, self.forwards))

    def covariance(self):
        """Total covariance of the log returns over the maturity."""
        return np.outer(self.vols, self.vols) * self.correlation * self.maturity

    def replace(self, **changes):
        """Copy of the basket with some fields changed."""
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings. The seed is mandatory."""

    n_paths: int
    seed: int
    antithetic: bool = True
    batch_size: int = MC_DEFAULT_BATCH_SIZE
    threads: int = MC_DEFAULT_THREADS

    def __post_init__(self):
        """Validate the settings."""
        _check(
            isinstance(self.seed, (int, np.integer))
            and not isinstance(self.seed, bool)
            and self.seed >= 0,
            "A nonnegative integer seed is mandatory for Monte Carlo, got {}.",
            self.seed,
        )
        _check(
            self.n_paths >= MC_MIN_PATHS,
            "Monte Carlo pricing needs at least {} paths, got {}.",
            MC_MIN_PATHS,
            self.n_paths,
        )
        _check(
            not self.antithetic or self.n_paths % 2 == 0,
            "Antithetic sampling needs an even number of paths, got {}.",
            self.n_paths,
        )
        _check(self.batch_size >= 1, "Batch size must be positive.")
        _check(self.threads >= 1, "Number of threads must be positive.")

    @property
    def blocks_per_batch(self):
        """Number of random substreams handed to one worker task."""
        return max(1, self.batch_size // MC_BLOCK_SIZE)

    def replace(self, **changes):
        """Copy of the settings with some fields changed."""
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass
class CalibrationReport:
    """Outcome of a calibration.

    ``mismatches`` holds the max vol mismatch before the first update and
    after every update, so it has ``iterations + 1`` entries for the fixed
    point. For the tuple calibration it holds the best objective of every
    restart.
    """

    iterations: int = 0
    mismatches: list = dataclasses.field(default_factory=list)
    converged: bool = False
    oscillation: bool = False
    curve: Optional[DiffusiveVolCurve] = None
    jump_params: Optional[JumpParams] = None
    objective: Optional[float] = None
    message: str = ""

    def to_dict(self):
        """Serialisable representation."""
        return {
            "iterations": self.iterations,
            "mismatches": [float(m) for m in self.mismatches],
            "converged": self.converged,
            "oscillation": self.oscillation,
            "curve": self.curve.to_dict() if self.curve is not None else None,
            "jump_params": (
                self.jump_params.to_dict() if self.jump_params is not None else None
            ),
            "objective": None if self.objective is None else float(self.objective),
            "message": self.message,
        }


class MarginalDistribution:
    """Terminal distribution of one asset on a strike grid.

    Within the grid the CDF is linear between nodes. Below the grid it
    decreases linearly to zero at ``K = 0``; above it approaches one as
    ``1 - c / K``. The quantile function clamps to the grid ends.
    """

    def __init__(
        self, strikes, cdf_values, forward, maturity, asset_id=None, jumps=None
    ):
        """Initialise from nondecreasing CDF values on ascending strikes."""
        self.strikes = np.asarray(strikes, dtype=float)
        self.cdf_values = np.asarray(cdf_values, dtype=float)
        self.forward = forward
        self.maturity = maturity
        self.asset_id = asset_id
        self.jumps = jumps
        _check(
            self.strikes.shape == self.cdf_values.shape and self.strikes.size >= 2,
            "Marginal distribution needs matching strike and CDF grids.",
        )
        _check(
            np.all(np.diff(self.cdf_values) >= 0)
            and self.cdf_values[0] >= 0
            and self.cdf_values[-1] <= 1,
            "Marginal CDF values must be nondecreasing in [0, 1].",
        )

    def cdf(self, strike):
        """Distribution function at arbitrary positive strikes."""
        strike = np.asarray(strike, dtype=float)
        low, high = self.strikes[0], self.strikes[-1]
        inside = np.interp(strike, self.strikes, self.cdf_values)
        below = self.cdf_values[0] * np.clip(strike, 0.0, low) / low
        above = 1.0 - (1.0 - self.cdf_values[-1]) * high / np.maximum(strike, high)
        value = np.where(strike < low, below, np.where(strike > high, above, inside))
        return value.item() if value.ndim == 0 else value

    def quantile(self, u, return_clamped=False):
        """Inverse of the piecewise linear distribution function.

        Located by binary search on the CDF nodes, then solved exactly
        within the cell, so no bisection tolerance applies.

        :param u: Probabilities, clamped to
            ``[QUANTILE_CLAMP, 1 - QUANTILE_CLAMP]`` first.
        :param return_clamped: Also return the number of probabilities that
            were clamped or fell outside of the grid.
        :return: Strikes, and the clamp count when requested.
        """
        u = np.asarray(u, dtype=float)
        clamped = np.clip(u, QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
        cdf = self.cdf_values
        outside = (clamped != u) | (clamped < cdf[0]) | (clamped >= cdf[-1])
        index = np.searchsorted(cdf, clamped, side="right") - 1
        index = np.clip(index, 0, cdf.size - 2)
        left, right = cdf[index], cdf[index + 1]
        width = np.where(right > left, right - left, 1.0)
        weight = np.clip((clamped - left) / width, 0.0, 1.0)
        value = self.strikes[index] + weight * (
            self.strikes[index + 1] - self.strikes[index]
        )
        value = np.where(clamped < cdf[0], self.strikes[0], value)
        value = np.where(clamped >= cdf[-1], self.strikes[-1], value)
        value = value.item() if value.ndim == 0 else value
        if return_clamped:
            return value, int(np.count_nonzero(outside))
        return value

    def mean(self):
        """Expectation of the distribution sampled by :meth:`quantile`."""
        cdf, strikes = self.cdf_values, self.strikes
        cells = np.diff(cdf) * 0.5 * (strikes[:-1] + strikes[1:])
        return float(
            cdf[0] * strikes[0] + np.sum(cells) + (1.0 - cdf[-1]) * strikes[-1]
        )

    def __repr__(self):
        """Marginal representation."""
        return "<MarginalDistribution {} T={} jumps={}>".format(
            self.asset_id, self.maturity, self.jumps
        )
