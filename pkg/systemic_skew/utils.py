# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew utils."""

import hashlib
import logging

import numpy as np

from systemic_skew.config import PSD_TOLERANCE, SYMMETRY_TOLERANCE
from systemic_skew.errors import CholeskyError, ValidationError


def symmetrize(matrix, label="correlation matrix"):
    """Average a matrix with its transpose.

    :param matrix: Square matrix.
    :param label: Name used in the warning emitted when the asymmetry
        exceeds ``SYMMETRY_TOLERANCE``.
    :return: Symmetric matrix.
    """
    matrix = np.array(matrix, dtype=float)
    asymmetry = np.max(np.abs(matrix - matrix.T)) if matrix.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE:
        logging.warning(
            "The {} is asymmetric by {:.3g}, averaging it with its transpose.".format(
                label, asymmetry
            )
        )
    return 0.5 * (matrix + matrix.T)


def repair_correlation(matrix, tolerance=PSD_TOLERANCE):
    """Turn a matrix into a valid correlation matrix.

    Eigenvalues below ``-tolerance`` are clipped at zero and the result is
    rescaled back to a unit diagonal.

    :param matrix: Square, nearly symmetric matrix with unit diagonal.
    :return: Symmetric positive semidefinite matrix with unit diagonal.
    :rtype: numpy.ndarray
    """
    matrix = np.array(matrix, dtype=float, ndmin=2)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(
            "Correlation matrix must be square, got shape {}.".format(matrix.shape)
        )
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("Correlation matrix has non-finite entries.")
    if np.any(np.abs(np.diag(matrix) - 1.0) > SYMMETRY_TOLERANCE):
        raise ValidationError(
            "Correlation matrix diagonal must be one, got {}.".format(np.diag(matrix))
        )
    if np.any(np.abs(matrix) > 1.0 + SYMMETRY_TOLERANCE):
        raise ValidationError("Correlations must lie in [-1, 1].")
    matrix = symmetrize(matrix)
    np.fill_diagonal(matrix, 1.0)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues[0] >= -tolerance:
        return matrix
    logging.warning(
        "Correlation matrix is not positive semidefinite (smallest eigenvalue "
        "{:.3g}), clipping its eigenvalues.".format(eigenvalues[0])
    )
    clipped = (eigenvectors * np.maximum(eigenvalues, 0.0)) @ eigenvectors.T
    scale = np.sqrt(np.diag(clipped))
    if np.any(scale <= 0):
        raise CholeskyError("Correlation matrix repair left a zero variance.")
    repaired = clipped / np.outer(scale, scale)
    repaired = 0.5 * (repaired + repaired.T)
    np.fill_diagonal(repaired, 1.0)
    return repaired


def correlation_factor(matrix):
    """Factor ``L`` with ``L @ L.T == matrix``.

    Uses the Cholesky factor and falls back to the eigen decomposition for
    singular matrices such as perfect correlation.

    :raises CholeskyError: The matrix is not positive semidefinite.
    """
    matrix = np.asarray(matrix, dtype=float)
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        eigenvalues, eigenvectors = np.linalg.eigh(matrix)
        if eigenvalues[0] < -PSD_TOLERANCE:
            raise CholeskyError(
                "Correlation matrix has no factor, smallest eigenvalue {:.3g}.".format(
                    eigenvalues[0]
                )
            )
        logging.debug("Singular correlation matrix, using its eigen factor.")
        return eigenvectors * np.sqrt(np.maximum(eigenvalues, 0.0))


def moneyness_grid(low, high, count):
    """Evenly spaced moneyness levels ``K/F``.

    :return: Array of ``count`` levels from ``low`` to ``high``.
    """
    if not 0 < low <= high or count < 1 or (count == 1 and low != high):
        raise ValidationError(
            "Invalid moneyness grid from {} to {} with {} strikes.".format(
                low, high, count
            )
        )
    return np.linspace(low, high, count)


def file_checksum(path):
    """Compute the sha256 checksum of a file.

    :param path: Path of the file.
    :return: Hexadecimal digest prefixed with ``sha256:``.
    """
    digest = hashlib.sha256()
    with open(path, "rb") as file_:
        for chunk in iter(lambda: file_.read(65536), b""):
            digest.update(chunk)
    return "sha256:{}".format(digest.hexdigest())
