# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew errors.

Every error class carries the exit code the command line reports for it.
"""

from collections import namedtuple


class SystemicSkewError(Exception):
    """Base class of all Systemic-Skew errors."""

    exit_code = 1


class ValidationError(SystemicSkewError, ValueError):
    """Invalid parameters or inputs."""

    exit_code = 2


Violation = namedtuple("Violation", ["kind", "path", "line", "column", "message"])
"""One market data problem; ``kind`` is ``parse``, ``schema`` or ``consistency``."""


class MarketDataError(ValidationError):
    """Market data bundle failed validation.

    Lists every violation found, not only the first one.
    """

    def __init__(self, violations):
        """Initialise with a list of :class:`Violation`."""
        self.violations = list(violations)
        super().__init__(
            "{} market data violation(s):\n{}".format(
                len(self.violations),
                "\n".join(format_violation(v) for v in self.violations),
            )
        )


def format_violation(violation):
    """Render a violation as ``path:line:column: kind error: message``."""
    location = str(violation.path)
    if violation.line is not None:
        location += ":{}".format(violation.line)
        if violation.column is not None:
            location += ":{}".format(violation.column)
    return "{}: {} error: {}".format(location, violation.kind, violation.message)


class NumericalError(SystemicSkewError, ArithmeticError):
    """A numerical procedure failed."""

    exit_code = 3


class NoSolutionError(NumericalError):
    """Option price outside of the arbitrage bounds of the implied vol."""

    def __init__(self, message, bound):
        """Initialise with the violated bound, ``lower`` or ``upper``."""
        self.bound = bound
        super().__init__(message)


class TruncationError(NumericalError):
    """Poisson series cannot be truncated within tolerance."""


class CholeskyError(NumericalError):
    """Correlation matrix has no Cholesky factor even after repair."""


class MomentFitError(NumericalError):
    """Basket moments cannot be matched by a lognormal distribution."""


class NegativeVolError(NumericalError):
    """Fixed-point iteration produced a non-positive diffusive vol."""

    def __init__(self, message, report=None):
        """Initialise with the calibration report at failure."""
        self.report = report
        super().__init__(message)


class ConvergenceError(SystemicSkewError):
    """A calibration did not converge."""

    exit_code = 4

    def __init__(self, message, report=None):
        """Initialise with the calibration report at failure."""
        self.report = report
        super().__init__(message)


class InfeasibleCorrelationError(ConvergenceError):
    """Diffusive correlation required by a total correlation is out of range."""

    def __init__(self, message, feasible_lambda=None):
        """Initialise with the feasible intensity range ``(low, high)``."""
        self.feasible_lambda = feasible_lambda
        super().__init__(message)
