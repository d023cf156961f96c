# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew random number tests."""

import numpy as np
import pytest

from systemic_skew.sampling import Stream


def test_block_uniforms_are_reproducible():
    """Tests for block_uniforms() with equal keys."""
    from systemic_skew.sampling import block_uniforms

    first = block_uniforms(7, Stream.copula, 3, 100, 4)
    second = block_uniforms(7, Stream.copula, 3, 100, 4)
    assert first.shape == (100, 4)
    np.testing.assert_array_equal(first, second)
    assert np.all((first > 0) & (first < 1))


@pytest.mark.parametrize(
    "other",
    [(8, Stream.copula, 3), (7, Stream.merton_paths, 3), (7, Stream.copula, 4)],
)
def test_block_uniforms_differ_by_key(other):
    """Tests for distinct substreams."""
    from systemic_skew.sampling import block_uniforms

    reference = block_uniforms(7, Stream.copula, 3, 50, 2)
    assert not np.array_equal(reference, block_uniforms(*other, 50, 2))


def test_antithetic_uniforms():
    """Tests for mirrored antithetic halves."""
    from systemic_skew.sampling import block_uniforms

    uniforms = block_uniforms(1, Stream.copula, 0, 10, 3, antithetic=True)
    np.testing.assert_allclose(uniforms[5:], 1.0 - uniforms[:5])


def test_block_sizes():
    """Tests for block_sizes()."""
    from systemic_skew.sampling import block_sizes

    assert block_sizes(10000) == [4096, 4096, 1808]
    assert block_sizes(8192) == [4096, 4096]
    assert block_sizes(10) == [10]


@pytest.mark.parametrize("blocks_per_batch, threads", [(1, 1), (1, 3), (2, 4)])
def test_run_blocks_order(blocks_per_batch, threads):
    """Tests for run_blocks() results in block order."""
    from systemic_skew.sampling import run_blocks

    results = run_blocks(
        lambda block, size: (block, size), 3 * 4096 + 5, blocks_per_batch, threads
    )
    assert results == [(0, 4096), (1, 4096), (2, 4096), (3, 5)]


def test_correlated_normals():
    """Tests for correlated_normals() covariance."""
    from systemic_skew.analytic import norm_ppf
    from systemic_skew.sampling import block_uniforms, correlated_normals

    correlation = np.array([[1.0, 0.7], [0.7, 1.0]])
    normals = norm_ppf(block_uniforms(11, Stream.copula, 0, 4096, 2))
    sample = correlated_normals(normals, np.linalg.cholesky(correlation))
    assert np.corrcoef(sample.T)[0, 1] == pytest.approx(0.7, abs=0.03)
