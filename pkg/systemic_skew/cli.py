# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew command line."""

import dataclasses
import logging
import sys
from typing import Optional, Tuple

import click
import numpy as np

from systemic_skew.config import (
    CALIBRATION_MAX_EVALUATIONS,
    CALIBRATION_RESTARTS,
    DEFAULT_MONEYNESS_GRID,
    DEFAULT_SEARCH_SPACE,
    FIXED_POINT_MAX_ITERATIONS,
    FIXED_POINT_TOLERANCE,
    MC_DEFAULT_BATCH_SIZE,
    MC_DEFAULT_PATHS,
    MC_DEFAULT_THREADS,
)
from systemic_skew.errors import (
    ConvergenceError,
    InfeasibleCorrelationError,
    NegativeVolError,
    NumericalError,
    SystemicSkewError,
    ValidationError,
)
from systemic_skew.models import JumpParams, McConfig

MODES = ("tm", "copula")
FAILURES = (SystemicSkewError, ArithmeticError, ValueError, np.linalg.LinAlgError)


@dataclasses.dataclass
class RunConfig:
    """Settings of one command line run.

    Jump overrides left as ``None`` keep the tuple of the bundle, or no
    jumps when the bundle has none.
    """

    bundle: str = "."
    output: Optional[str] = None
    maturity: Optional[float] = None
    asset: Optional[str] = None
    moneyness: Tuple[float, float, int] = DEFAULT_MONEYNESS_GRID
    mode: str = "tm"
    seed: Optional[int] = None
    n_paths: int = MC_DEFAULT_PATHS
    antithetic: bool = True
    batch_size: int = MC_DEFAULT_BATCH_SIZE
    threads: int = MC_DEFAULT_THREADS
    lambda_: Optional[float] = None
    k_hat: Optional[float] = None
    delta: Optional[float] = None
    sigma0: Optional[float] = None
    kappa: Optional[float] = None
    sigmas: Tuple[float, ...] = ()
    compare_gaussian: bool = False
    tolerance: float = FIXED_POINT_TOLERANCE
    max_iterations: int = FIXED_POINT_MAX_ITERATIONS
    search_space: dict = dataclasses.field(
        default_factory=lambda: dict(DEFAULT_SEARCH_SPACE)
    )
    restarts: int = CALIBRATION_RESTARTS
    max_evaluations: int = CALIBRATION_MAX_EVALUATIONS

    def moneyness_grid(self):
        """Moneyness levels ``K/F`` of the report."""
        from systemic_skew.utils import moneyness_grid

        return moneyness_grid(*self.moneyness)

    def jump_params(self, bundle):
        """Jump tuple of the bundle with the overrides applied."""
        base = bundle.jump_params or JumpParams.no_jumps()
        changes = {
            name: getattr(self, name)
            for name in ("lambda_", "k_hat", "delta", "sigma0", "kappa")
            if getattr(self, name) is not None
        }
        return base.replace(**changes)

    def mc_config(self):
        """Monte Carlo settings; the seed is mandatory."""
        if self.seed is None:
            raise ValidationError(
                "A --seed is required for Monte Carlo pricing; no implicit "
                "entropy is used."
            )
        return McConfig(
            n_paths=self.n_paths,
            seed=self.seed,
            antithetic=self.antithetic,
            batch_size=self.batch_size,
            threads=self.threads,
        )

    def select_maturity(self, bundle):
        """Requested maturity, or the only one of the bundle."""
        if self.maturity is not None:
            return bundle.maturities[bundle.maturity_index(self.maturity)]
        if len(bundle.maturities) > 1:
            raise ValidationError(
                "The bundle has maturities {}; select one with --maturity.".format(
                    list(bundle.maturities)
                )
            )
        return bundle.maturities[0]


def _echo_error(error):
    click.secho("[ERROR]: {}".format(error), err=True, fg="red")


def _fail(error):
    """Report an error, return its exit code; numpy and scipy errors get 3."""
    _echo_error(error)
    return getattr(error, "exit_code", NumericalError.exit_code)


def _emit(text, output):
    """Echo a report written to memory; files are written by the caller."""
    if output is None:
        click.echo(text, nl=False)


def cmd_price_single(config):
    """Price vanilla calls of one asset over a moneyness grid.

    With ``config.sigmas`` the plain Merton series is priced at every
    constant diffusive vol; otherwise the diffusive vol curve is solved by
    the fixed point first and the extended series is priced.

    :return: Exit code.
    """
    from systemic_skew.analytic import implied_vol
    from systemic_skew.calibration import fixed_point_diffusive_vol
    from systemic_skew.marketdata import load_bundle, write_skew_report
    from systemic_skew.merton import merton_call, merton_call_extended

    try:
        bundle = load_bundle(config.bundle)
        if config.asset is None:
            raise ValidationError("Select an asset with --asset.")
        maturity = config.select_maturity(bundle)
        slice_ = bundle.slice(config.asset, maturity)
        jump_params = config.jump_params(bundle)
        moneyness = config.moneyness_grid()
        strikes = moneyness * slice_.forward
        columns = {"strike": strikes}

        def add(suffix, prices):
            prices = np.atleast_1d(prices)
            columns["price" + suffix] = prices
            columns["implied_vol" + suffix] = [
                implied_vol(price, slice_.forward, maturity, strike, slice_.discount)
                for price, strike in zip(prices, strikes)
            ]

        if config.sigmas:
            for sigma in config.sigmas:
                add(
                    "_sigma={:g}".format(sigma),
                    merton_call(
                        slice_.forward,
                        maturity,
                        strikes,
                        sigma,
                        slice_.discount,
                        jump_params,
                    ),
                )
        else:
            curve, _ = fixed_point_diffusive_vol(
                slice_, jump_params, config.tolerance, config.max_iterations
            )
            columns["diffusive_vol"] = curve(strikes)
            add(
                "",
                merton_call_extended(
                    slice_.forward,
                    maturity,
                    strikes,
                    curve,
                    slice_.discount,
                    jump_params,
                ),
            )
        _emit(write_skew_report(columns, config.output, moneyness), config.output)
    except FAILURES as error:
        return _fail(error)
    return 0


def _basket_inputs(config, bundle):
    maturity = config.select_maturity(bundle)
    slices = bundle.component_slices(maturity)
    weights = bundle.weight_vector()
    forward = float(np.dot(weights, [slice_.forward for slice_ in slices]))
    return maturity, slices, weights, forward


def _tm_basket(config, bundle, jump_params, strikes):
    from systemic_skew.basket import merton_basket_call
    from systemic_skew.calibration import (
        diffusive_correlation_matrix,
        fixed_point_diffusive_vol,
    )
    from systemic_skew.models import BasketSpec

    maturity, slices, weights, _ = _basket_inputs(config, bundle)
    curves = [
        fixed_point_diffusive_vol(
            slice_, jump_params, config.tolerance, config.max_iterations
        )[0]
        for slice_ in slices
    ]
    vols = np.array([curve(slice_.forward) for curve, slice_ in zip(curves, slices)])
    sizes = np.array([jump_params.jump_size(vol) for vol in vols])
    rho_diffusive = diffusive_correlation_matrix(
        bundle.correlation, jump_params, sizes / vols, list(bundle.assets)
    )
    spec = BasketSpec(
        asset_ids=list(bundle.assets),
        weights=weights,
        forwards=[slice_.forward for slice_ in slices],
        vols=vols,
        correlation=rho_diffusive,
        maturity=maturity,
        discount=slices[0].discount,
    )
    return np.atleast_1d(merton_basket_call(spec, strikes, jump_params))


def cmd_price_basket(config):
    """Price basket calls over a moneyness grid of the basket forward.

    ``tm`` mode uses the three moment approximation per jump count,
    ``copula`` mode the skew consistent jump copula with standard errors.

    :return: Exit code.
    """
    from systemic_skew.calibration import basket_skew_model
    from systemic_skew.copula import basket_copula_pricer, implied_basket_vol_curve
    from systemic_skew.marketdata import load_bundle, write_skew_report
    from systemic_skew.merton import marginal_distribution

    try:
        if config.mode not in MODES:
            raise ValidationError(
                "Unknown basket mode {}, use one of {}.".format(config.mode, MODES)
            )
        mc = config.mc_config() if config.mode == "copula" else None
        bundle = load_bundle(config.bundle)
        jump_params = config.jump_params(bundle)
        maturity, slices, weights, forward = _basket_inputs(config, bundle)
        discount = slices[0].discount
        moneyness = config.moneyness_grid()
        strikes = moneyness * forward
        columns = {"strike": strikes}
        if config.mode == "tm":
            prices = _tm_basket(config, bundle, jump_params, strikes)
            columns["price"] = prices
            columns["implied_vol"] = implied_basket_vol_curve(
                prices, strikes, forward, discount, maturity
            ).vols
        else:
            skew = basket_skew_model(
                slices,
                weights,
                bundle.correlation,
                jump_params,
                mc,
                strikes,
                config.threads,
            )
            columns["price"] = skew.result.prices
            columns["std_error"] = skew.result.std_errors
            columns["implied_vol"] = skew.curve.vols
        if config.compare_gaussian:
            if mc is None:
                raise ValidationError("--compare-gaussian needs copula mode.")
            marginals = [
                marginal_distribution(
                    slice_.forward,
                    maturity,
                    slice_.vol_curve(),
                    discount,
                    JumpParams.no_jumps(jump_params.sigma0),
                    asset_id=slice_.asset_id,
                )
                for slice_ in slices
            ]
            gaussian = basket_copula_pricer(
                marginals, weights, strikes, bundle.correlation, mc, discount
            )
            columns["gaussian_price"] = gaussian.prices
            columns["gaussian_std_error"] = gaussian.std_errors
            columns["gaussian_implied_vol"] = implied_basket_vol_curve(
                gaussian.prices, strikes, forward, discount, maturity
            ).vols
        _emit(write_skew_report(columns, config.output, moneyness), config.output)
    except FAILURES as error:
        return _fail(error)
    return 0


def _calibrate_diffusive(config, bundle, jump_params):
    from systemic_skew.calibration import fixed_point_diffusive_vol

    if config.asset is None:
        raise ValidationError("Select an asset with --asset.")
    maturity = config.select_maturity(bundle)
    slice_ = bundle.slice(config.asset, maturity)
    document = {
        "mode": "diffusive",
        "asset": config.asset,
        "maturity": maturity,
        "jump_params": jump_params.to_dict(),
    }
    try:
        _, report = fixed_point_diffusive_vol(
            slice_, jump_params, config.tolerance, config.max_iterations
        )
        code = 0
    except (ConvergenceError, NegativeVolError) as error:
        if error.report is None:
            raise
        _echo_error(error)
        report, code = error.report, error.exit_code
    document["report"] = report.to_dict()
    return document, code


def _calibrate_tuple(config, bundle, jump_params):
    from systemic_skew.calibration import SearchSpace, calibrate_jump_tuple

    mc = config.mc_config()
    maturity = config.select_maturity(bundle)
    space = SearchSpace(sigma0=jump_params.sigma0, **config.search_space)
    document = {
        "mode": "tuple",
        "index": bundle.index,
        "maturity": maturity,
        "search_space": {
            name: list(getattr(space, name)) for name in SearchSpace.names
        },
        "seed": mc.seed,
        "n_paths": mc.n_paths,
    }
    try:
        _, report = calibrate_jump_tuple(
            bundle.index_slice(maturity),
            bundle.component_slices(maturity),
            bundle.weight_vector(),
            bundle.correlation,
            space,
            mc,
            config.threads,
            config.restarts,
            config.max_evaluations,
        )
    except InfeasibleCorrelationError as error:
        _echo_error(error)
        document["message"] = str(error)
        document["feasible_lambda"] = list(error.feasible_lambda or ())
        return document, error.exit_code
    document["report"] = report.to_dict()
    if not report.converged:
        _echo_error(report.message)
        return document, ConvergenceError.exit_code
    return document, 0


def cmd_calibrate(config):
    """Calibrate diffusive vols (``diffusive`` mode) or the jump tuple.

    The JSON report is written even when the calibration fails to converge.

    :return: Exit code.
    """
    from systemic_skew.marketdata import load_bundle, write_json_report

    try:
        bundle = load_bundle(config.bundle)
        jump_params = config.jump_params(bundle)
        if config.mode == "diffusive":
            document, code = _calibrate_diffusive(config, bundle, jump_params)
        elif config.mode == "tuple":
            document, code = _calibrate_tuple(config, bundle, jump_params)
        else:
            raise ValidationError("Unknown calibration mode {}.".format(config.mode))
        document["checksums"] = bundle.checksums
        _emit(write_json_report(document, config.output), config.output)
    except FAILURES as error:
        return _fail(error)
    return code


def cmd_report_correlation(rho, k_i, k_j, lambda_max, count, output=None):
    """Tabulate total and required diffusive correlations over intensities.

    :return: Exit code.
    """
    from systemic_skew.calibration import (
        feasible_lambda_range,
        required_diffusive_correlation,
        total_correlation,
    )
    from systemic_skew.marketdata import write_skew_report

    try:
        if not -1 <= rho <= 1 or lambda_max < 0 or count < 2:
            raise ValidationError(
                "Need a correlation in [-1, 1], a nonnegative intensity bound and "
                "at least two intensities."
            )
        intensities = np.linspace(0.0, lambda_max, count)
        _, feasible = feasible_lambda_range(rho, k_i, k_j)
        logging.info(
            "Feasible intensities for rho={}: [0, {:.6g}].".format(rho, feasible)
        )
        required = np.array(
            [
                required_diffusive_correlation(rho, lambda_, k_i, k_j)
                for lambda_ in intensities
            ]
        )
        columns = {
            "total_correlation": [
                total_correlation(
                    rho, JumpParams.no_jumps().replace(lambda_=lambda_), k_i, k_j
                )
                for lambda_ in intensities
            ],
            "required_diffusive": np.where(np.abs(required) <= 1, required, np.nan),
            "feasible": (intensities <= feasible).astype(float),
        }
        _emit(
            write_skew_report(columns, output, intensities, index_label="lambda"),
            output,
        )
    except FAILURES as error:
        return _fail(error)
    return 0


def _grid_options(func):
    low, high, count = DEFAULT_MONEYNESS_GRID
    for option in reversed(
        [
            click.option(
                "--min-moneyness", default=low, show_default=True, help="Lowest K/F."
            ),
            click.option(
                "--max-moneyness", default=high, show_default=True, help="Highest K/F."
            ),
            click.option(
                "--strikes", default=count, show_default=True, help="Number of strikes."
            ),
        ]
    ):
        func = option(func)
    return func


def _bundle_options(func):
    for option in reversed(
        [
            click.option(
                "--bundle",
                "-b",
                type=click.Path(exists=True),
                required=True,
                help="Market data bundle directory or manifest.",
            ),
            click.option(
                "--output",
                "-o",
                default=None,
                help="Report file, standard output if omitted.",
            ),
            click.option(
                "--maturity",
                "-t",
                type=float,
                default=None,
                help="Maturity in years, required when the bundle has several.",
            ),
        ]
    ):
        func = option(func)
    return func


def _jump_options(func):
    for option in reversed(
        [
            click.option("--lambda", "lambda_", type=float, help="Jump intensity."),
            click.option("--k-hat", type=float, help="Universal mean jump size."),
            click.option("--delta", type=float, help="Jump size dispersion."),
            click.option("--sigma0", type=float, help="Vol scale of the jump sizes."),
            click.option("--kappa", type=float, help="Jump size scaling exponent."),
        ]
    ):
        func = option(func)
    return func


def _mc_options(func):
    for option in reversed(
        [
            click.option("--seed", type=int, default=None, help="Monte Carlo seed."),
            click.option(
                "--paths", default=MC_DEFAULT_PATHS, show_default=True, help="Paths."
            ),
            click.option(
                "--antithetic/--no-antithetic",
                default=True,
                show_default=True,
                help="Antithetic uniforms.",
            ),
            click.option(
                "--batch-size",
                default=MC_DEFAULT_BATCH_SIZE,
                show_default=True,
                help="Paths per worker task.",
            ),
        ]
    ):
        func = option(func)
    return func


def _fixed_point_options(func):
    for option in reversed(
        [
            click.option(
                "--tolerance",
                default=FIXED_POINT_TOLERANCE,
                show_default=True,
                help="Fixed-point vol mismatch tolerance.",
            ),
            click.option(
                "--max-iterations",
                default=FIXED_POINT_MAX_ITERATIONS,
                show_default=True,
                help="Fixed-point updates.",
            ),
        ]
    ):
        func = option(func)
    return func


def _run_config(ctx, **kwargs):
    grid = (
        kwargs.pop("min_moneyness", None),
        kwargs.pop("max_moneyness", None),
        kwargs.pop("strikes", None),
    )
    if grid[0] is not None:
        kwargs["moneyness"] = grid
    if "paths" in kwargs:
        kwargs["n_paths"] = kwargs.pop("paths")
    return RunConfig(threads=ctx.obj["threads"], **kwargs)


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
    help="Logging level on standard error.",
)
@click.option(
    "--threads",
    default=MC_DEFAULT_THREADS,
    show_default=True,
    type=click.IntRange(min=1),
    help="Cap on worker threads.",
)
@click.pass_context
def cli(ctx, log_level, threads):
    """Systemic skew pricing and calibration commands."""
    logging.basicConfig(
        level=log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s: %(message)s",
    )
    ctx.obj = {"threads": threads}


@cli.command("price-single")
@_bundle_options
@click.option("--asset", "-a", required=True, help="Asset id.")
@_grid_options
@_jump_options
@_fixed_point_options
@click.option(
    "--sigma",
    "sigmas",
    type=float,
    multiple=True,
    help="Constant diffusive vol, repeatable; skips the fixed point.",
)
@click.pass_context
def price_single(ctx, **kwargs):
    """Price vanilla calls of one asset under systemic jumps."""
    sys.exit(cmd_price_single(_run_config(ctx, **kwargs)))


@cli.command("price-basket")
@_bundle_options
@click.option(
    "--mode",
    type=click.Choice(MODES),
    default="tm",
    show_default=True,
    help="Three moment approximation or jump copula Monte Carlo.",
)
@_grid_options
@_jump_options
@_fixed_point_options
@_mc_options
@click.option(
    "--compare-gaussian",
    is_flag=True,
    help="Add the Gaussian copula curve without jumps on the same seed.",
)
@click.pass_context
def price_basket(ctx, **kwargs):
    """Price basket calls of the bundle components."""
    sys.exit(cmd_price_basket(_run_config(ctx, **kwargs)))


@cli.command("calibrate-diffusive")
@_bundle_options
@click.option("--asset", "-a", required=True, help="Asset id.")
@_jump_options
@_fixed_point_options
@click.pass_context
def calibrate_diffusive(ctx, **kwargs):
    """Solve the diffusive vol curve of one asset and write a JSON report."""
    sys.exit(cmd_calibrate(_run_config(ctx, mode="diffusive", **kwargs)))


def _range_option(name, label):
    low, high = DEFAULT_SEARCH_SPACE[name]
    return click.option(
        "--{}-range".format(label),
        name,
        type=(float, float),
        default=(low, high),
        show_default=True,
        help="Search range of {}.".format(label),
    )


@cli.command("calibrate-tuple")
@_bundle_options
@_range_option("lambda_", "lambda")
@_range_option("k_hat", "k-hat")
@_range_option("delta", "delta")
@_range_option("kappa", "kappa")
@click.option("--sigma0", type=float, help="Vol scale of the jump sizes.")
@_mc_options
@click.option(
    "--restarts", default=CALIBRATION_RESTARTS, show_default=True, help="Restarts."
)
@click.option(
    "--max-evaluations",
    default=CALIBRATION_MAX_EVALUATIONS,
    show_default=True,
    help="Objective evaluations per restart.",
)
@click.pass_context
def calibrate_tuple(ctx, lambda_, k_hat, delta, kappa, **kwargs):
    """Calibrate the jump tuple to the index skew and write a JSON report."""
    search_space = {"lambda_": lambda_, "k_hat": k_hat, "delta": delta, "kappa": kappa}
    sys.exit(
        cmd_calibrate(
            _run_config(ctx, mode="tuple", search_space=search_space, **kwargs)
        )
    )


@cli.command("report-correlation")
@click.option("--rho", type=float, required=True, help="Correlation of the pair.")
@click.option("--k-hat-i", type=float, required=True, help="Jump size of asset i.")
@click.option("--k-hat-j", type=float, required=True, help="Jump size of asset j.")
@click.option(
    "--lambda-max", default=2.0, show_default=True, help="Largest intensity."
)
@click.option("--count", default=21, show_default=True, help="Number of intensities.")
@click.option("--output", "-o", default=None, help="Report file.")
def report_correlation(rho, k_hat_i, k_hat_j, lambda_max, count, output):
    """Tabulate total and required diffusive correlations over intensities."""
    sys.exit(cmd_report_correlation(rho, k_hat_i, k_hat_j, lambda_max, count, output))
