# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Reproducible random numbers for the Monte Carlo pricers.

Paths are cut into blocks of ``MC_BLOCK_SIZE``. Every block draws from its
own Philox substream keyed by ``(seed, stream, block)``, so a path gets the
same numbers whatever the batch size or the number of threads. Results
are reduced in ascending block order.
"""

import enum
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from systemic_skew.config import MC_BLOCK_SIZE

UNIFORM_EPSILON = 2.0 ** -53
"""Uniforms are kept in ``[eps, 1 - eps]`` so that normals stay finite."""


class Stream(enum.Enum):
    """Random substream families, one per simulation purpose."""

    merton_paths = 0
    basket_paths = 1
    copula = 2
    lognormal_basket = 3


def block_uniforms(seed, stream, block, n, dim, antithetic=False):
    """Uniform deviates of one block.

    :param seed: User seed.
    :param stream: :class:`Stream` of the simulation.
    :param block: Block index.
    :param n: Number of paths in the block.
    :param dim: Number of uniforms per path.
    :param antithetic: Second half of the paths mirrors the first one,
        ``u -> 1 - u``. ``n`` must then be even.
    :return: Array of shape ``(n, dim)``.
    """
    key = (Stream(stream).value, int(block))
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key))
    )
    if antithetic:
        half = rng.random((n // 2, dim))
        uniforms = np.concatenate([half, 1.0 - half])
    else:
        uniforms = rng.random((n, dim))
    return np.clip(uniforms, UNIFORM_EPSILON, 1.0 - UNIFORM_EPSILON)


def correlated_normals(normals, factor):
    """Correlate independent normals (one path per row) with ``L @ L.T``."""
    return normals @ np.asarray(factor).T


def block_sizes(n_paths):
    """Number of paths of every block."""
    full, rest = divmod(int(n_paths), MC_BLOCK_SIZE)
    return [MC_BLOCK_SIZE] * full + ([rest] if rest else [])


def run_blocks(func, n_paths, blocks_per_batch=1, threads=1):
    """Run ``func(block, size)`` on every block.

    Blocks are grouped into batches of ``blocks_per_batch`` and the batches
    run on a pool of ``threads`` workers.

    :return: List of the block results in ascending block order.
    """
    sizes = block_sizes(n_paths)
    batches = [
        list(range(start, min(start + blocks_per_batch, len(sizes))))
        for start in range(0, len(sizes), blocks_per_batch)
    ]

    def run_batch(blocks):
        return [func(block, sizes[block]) for block in blocks]

    if threads > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run_batch, batches))
    else:
        results = [run_batch(blocks) for blocks in batches]
    return [result for batch in results for result in batch]
