# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Market data bundles and result tables.

A bundle is a directory holding ``manifest.ini``, one surface file per
asset with the header ``strike,maturity,implied_vol`` and a square
correlation table labelled with the asset ids::

    [bundle]
    assets = SAP SIE ALV
    index = DAX
    maturities = 0.5 1.0
    discounts = 0.99 0.98
    correlation = correlation.csv
    surfaces = surfaces

    [weights]
    SAP = 0.2

    [forwards]
    SAP = 100.0 100.5

    [jump]
    lambda = 0.25
    k_hat = -0.16
    delta = 0.18
"""

import configparser
import dataclasses
import json
import os
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from systemic_skew.config import DEFAULT_SIGMA0
from systemic_skew.errors import (
    MarketDataError,
    SystemicSkewError,
    ValidationError,
    Violation,
)
from systemic_skew.models import JumpParams, VolSurfaceSlice
from systemic_skew.utils import file_checksum, symmetrize

MANIFEST = "manifest.ini"
SURFACE_COLUMNS = ("strike", "maturity", "implied_vol")
MATURITY_TOLERANCE = 1e-9
BUNDLE_FLOAT_FORMAT = "%.12g"
REPORT_FLOAT_FORMAT = "%.6g"
READ_ERRORS = (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError)


@dataclasses.dataclass(frozen=True)
class MarketBundle:
    """Validated market data, immutable after loading."""

    assets: Tuple[str, ...]
    maturities: Tuple[float, ...]
    discounts: Tuple[float, ...]
    weights: Dict[str, float]
    slices: Dict[Tuple[str, int], VolSurfaceSlice]
    correlation: np.ndarray
    index: Optional[str] = None
    jump_params: Optional[JumpParams] = None
    checksums: Dict[str, str] = dataclasses.field(default_factory=dict)
    path: Optional[str] = None

    @classmethod
    def from_slices(
        cls, component_slices, weights, correlation, index_slices=(), jump_params=None
    ):
        """Bundle from slices sharing their maturities and discounts."""
        assets = []
        for slice_ in component_slices:
            if slice_.asset_id not in assets:
                assets.append(slice_.asset_id)
        maturities = sorted({slice_.maturity for slice_ in component_slices})
        discounts = {}
        slices = {}
        index_ids = {slice_.asset_id for slice_ in index_slices}
        if len(index_ids) > 1:
            raise ValidationError("Bundle holds one index, got {}.".format(index_ids))
        for slice_ in list(component_slices) + list(index_slices):
            position = maturities.index(slice_.maturity)
            discounts.setdefault(position, slice_.discount)
            slices[(slice_.asset_id, position)] = slice_
        return cls(
            assets=tuple(assets),
            maturities=tuple(maturities),
            discounts=tuple(discounts[i] for i in range(len(maturities))),
            weights={asset: float(w) for asset, w in zip(assets, weights)},
            slices=slices,
            correlation=np.asarray(correlation, dtype=float),
            index=index_ids.pop() if index_ids else None,
            jump_params=jump_params,
        )

    def maturity_index(self, maturity):
        """Position of a maturity of the bundle."""
        for position, candidate in enumerate(self.maturities):
            if abs(candidate - maturity) <= MATURITY_TOLERANCE:
                return position
        raise ValidationError(
            "Maturity {} is not in the bundle, available maturities: {}.".format(
                maturity, list(self.maturities)
            )
        )

    def slice(self, asset_id, maturity):
        """Surface slice of one asset or of the index."""
        if asset_id not in self.assets and asset_id != self.index:
            raise ValidationError(
                "Unknown asset id {}, bundle assets: {}.".format(
                    asset_id, list(self.assets)
                )
            )
        return self.slices[(asset_id, self.maturity_index(maturity))]

    def index_slice(self, maturity):
        """Surface slice of the index."""
        if self.index is None:
            raise ValidationError("The bundle has no index surface.")
        return self.slice(self.index, maturity)

    def component_slices(self, maturity):
        """Slices of all components in asset order."""
        return [self.slice(asset, maturity) for asset in self.assets]

    def weight_vector(self, asset_ids=None):
        """Basket weights in asset order."""
        return np.array([self.weights[asset] for asset in asset_ids or self.assets])

    def correlation_for(self, asset_ids):
        """Correlation sub-matrix of some assets."""
        positions = []
        for asset_id in asset_ids:
            if asset_id not in self.assets:
                raise ValidationError("Unknown asset id {}.".format(asset_id))
            positions.append(self.assets.index(asset_id))
        return self.correlation[np.ix_(positions, positions)]


class _Collector:
    """Accumulates violations of one bundle."""

    def __init__(self, root):
        self.root = root
        self.violations = []

    def add(self, kind, path, message, line=None, column=None):
        relative = os.path.relpath(path, self.root) if path else self.root
        self.violations.append(Violation(kind, relative, line, column, message))

    def number(self, text, path, field, line=None, column=None):
        """Parse a decimal number, ``None`` on failure."""
        try:
            value = float(text.strip())
        except (AttributeError, ValueError):
            value = None
        if value is None or not np.isfinite(value):
            self.add(
                "parse",
                path,
                "{} {!r} is not a decimal number".format(field, text),
                line,
                column,
            )
            return None
        return value

    def numbers(self, text, path, field):
        values = [self.number(item, path, field) for item in text.split()]
        return None if any(value is None for value in values) else values


def _read_manifest(collector, manifest_path):
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(manifest_path, encoding="utf-8") as file_:
            parser.read_file(file_)
    except FileNotFoundError:
        collector.add("schema", manifest_path, "manifest file is missing")
        return None
    except UnicodeDecodeError as error:
        collector.add("parse", manifest_path, "cannot decode: {}".format(error))
        return None
    except configparser.ParsingError as error:
        for line, text in error.errors:
            collector.add("parse", manifest_path, "cannot parse {}".format(text), line)
        return None
    except configparser.Error as error:
        collector.add(
            "parse", manifest_path, str(error), getattr(error, "lineno", None)
        )
        return None
    for section, keys in (
        ("bundle", ("assets", "maturities", "discounts", "correlation", "surfaces")),
        ("weights", ()),
        ("forwards", ()),
    ):
        if not parser.has_section(section):
            collector.add(
                "schema", manifest_path, "missing section [{}]".format(section)
            )
            continue
        for key in keys:
            if not parser.has_option(section, key):
                collector.add(
                    "schema",
                    manifest_path,
                    "missing field {} in [{}]".format(key, section),
                )
    return None if collector.violations else parser


def _read_jump_params(collector, parser, manifest_path):
    if not parser.has_section("jump"):
        return None
    section = parser["jump"]
    values = {}
    for key, name, default in (
        ("lambda", "lambda_", None),
        ("k_hat", "k_hat", None),
        ("delta", "delta", None),
        ("sigma0", "sigma0", DEFAULT_SIGMA0),
        ("kappa", "kappa", 0.0),
    ):
        if key in section:
            values[name] = collector.number(section[key], manifest_path, key)
        elif default is None:
            collector.add(
                "schema", manifest_path, "missing field {} in [jump]".format(key)
            )
        else:
            values[name] = default
    if collector.violations or any(value is None for value in values.values()):
        return None
    try:
        return JumpParams(**values)
    except ValidationError as error:
        collector.add("consistency", manifest_path, str(error))
        return None


def _read_surface(collector, path, asset_id, maturities, discounts, forwards):
    """Slices of one surface file keyed by maturity position."""
    try:
        table = pd.read_csv(path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        collector.add("schema", path, "surface file of {} is missing".format(asset_id))
        return {}
    except READ_ERRORS as error:
        collector.add("parse", path, str(error).strip())
        return {}
    columns = [column.strip() for column in table.columns]
    missing = [column for column in SURFACE_COLUMNS if column not in columns]
    if missing:
        collector.add(
            "schema",
            path,
            "missing field(s) {} in header".format(", ".join(missing)),
            1,
        )
        return {}
    table.columns = columns
    rows = {position: [] for position in range(len(maturities))}
    for row, record in enumerate(table.itertuples(index=False)):
        line = row + 2
        parsed = []
        for field in SURFACE_COLUMNS:
            column = columns.index(field) + 1
            parsed.append(
                collector.number(getattr(record, field), path, field, line, column)
            )
        if None in parsed:
            continue
        strike, maturity, vol = parsed
        position = next(
            (
                i
                for i, candidate in enumerate(maturities)
                if abs(candidate - maturity) <= MATURITY_TOLERANCE
            ),
            None,
        )
        if position is None:
            collector.add(
                "consistency",
                path,
                "maturity {} is not listed in the manifest".format(maturity),
                line,
                columns.index("maturity") + 1,
            )
            continue
        rows[position].append((line, strike, vol))

    slices = {}
    strike_column = columns.index("strike") + 1
    for position, quotes in rows.items():
        if not quotes:
            collector.add(
                "consistency",
                path,
                "no quotes of {} at maturity {}".format(asset_id, maturities[position]),
            )
            continue
        seen = {}
        valid = True
        for index, (line, strike, _) in enumerate(quotes):
            if strike in seen:
                collector.add(
                    "schema",
                    path,
                    "duplicate strike {} (first on line {})".format(
                        strike, seen[strike]
                    ),
                    line,
                    strike_column,
                )
                valid = False
            elif index and strike < quotes[index - 1][1]:
                collector.add(
                    "consistency",
                    path,
                    "strike {} is not ascending".format(strike),
                    line,
                    strike_column,
                )
                valid = False
            seen.setdefault(strike, line)
        if not valid:
            continue
        try:
            slices[position] = VolSurfaceSlice(
                asset_id,
                maturities[position],
                forwards[position],
                discounts[position],
                [strike for _, strike, _ in quotes],
                [vol for _, _, vol in quotes],
            )
        except ValidationError as error:
            collector.add("consistency", path, str(error), quotes[0][0])
    return slices


def _read_correlation(collector, path, assets):
    try:
        table = pd.read_csv(path, dtype=str, keep_default_na=False, index_col=0)
    except FileNotFoundError:
        collector.add("schema", path, "correlation file is missing")
        return None
    except READ_ERRORS as error:
        collector.add("parse", path, str(error).strip())
        return None
    columns = [str(label).strip() for label in table.columns]
    rows = [str(label).strip() for label in table.index]
    if columns != rows:
        collector.add(
            "consistency",
            path,
            "row labels {} differ from column labels {}".format(rows, columns),
            1,
        )
        return None
    for label in columns:
        if label not in assets:
            collector.add(
                "consistency",
                path,
                "label {} has no surface in the bundle".format(label),
                1,
            )
    for asset in assets:
        if asset not in columns:
            collector.add(
                "consistency",
                path,
                "asset {} has no correlation entry".format(asset),
                1,
            )
    matrix = np.full((len(columns), len(columns)), np.nan)
    for row in range(len(rows)):
        for column in range(len(columns)):
            value = collector.number(
                table.iat[row, column], path, "correlation", row + 2, column + 2
            )
            if value is not None:
                matrix[row, column] = value
    if collector.violations:
        return None
    if np.any(np.abs(matrix) > 1) or np.any(np.diag(matrix) != 1):
        collector.add(
            "consistency",
            path,
            "correlations must lie in [-1, 1] with a unit diagonal",
        )
        return None
    order = [columns.index(asset) for asset in assets]
    return symmetrize(matrix[np.ix_(order, order)], label=path)


def load_bundle(path):
    """Load and validate a market data bundle.

    :param path: Bundle directory or its manifest file.
    :rtype: :class:`MarketBundle`
    :raises MarketDataError: Listing every violation found.
    """
    if os.path.isdir(path):
        root, manifest_path = path, os.path.join(path, MANIFEST)
    else:
        root, manifest_path = os.path.dirname(path) or ".", path
    collector = _Collector(root)
    parser = _read_manifest(collector, manifest_path)
    if parser is None:
        raise MarketDataError(collector.violations)

    bundle = parser["bundle"]
    assets = tuple(bundle["assets"].split())
    index = bundle.get("index", "").strip() or None
    maturities = collector.numbers(bundle["maturities"], manifest_path, "maturities")
    discounts = collector.numbers(bundle["discounts"], manifest_path, "discounts")
    if not assets:
        collector.add("schema", manifest_path, "no assets listed in [bundle]")
    if len(set(assets)) != len(assets) or index in assets:
        collector.add("consistency", manifest_path, "asset ids must be unique")
    if maturities and discounts and len(maturities) != len(discounts):
        collector.add(
            "consistency",
            manifest_path,
            "{} maturities but {} discounts".format(len(maturities), len(discounts)),
        )
    if maturities and sorted(maturities) != maturities:
        collector.add("consistency", manifest_path, "maturities must be ascending")

    weights = {}
    for asset in assets:
        if asset not in parser["weights"]:
            collector.add("schema", manifest_path, "missing weight of {}".format(asset))
        else:
            weights[asset] = collector.number(
                parser["weights"][asset], manifest_path, "weight of {}".format(asset)
            )
    for label in parser["weights"]:
        if label not in assets:
            collector.add(
                "consistency", manifest_path, "weight of unknown asset {}".format(label)
            )

    forwards = {}
    for asset in assets + ((index,) if index else ()):
        if asset not in parser["forwards"]:
            collector.add(
                "schema", manifest_path, "missing forwards of {}".format(asset)
            )
            continue
        values = collector.numbers(parser["forwards"][asset], manifest_path, "forward")
        if values is not None and maturities and len(values) != len(maturities):
            collector.add(
                "consistency",
                manifest_path,
                "{} has {} forwards for {} maturities".format(
                    asset, len(values), len(maturities)
                ),
            )
        else:
            forwards[asset] = values
    jump_params = _read_jump_params(collector, parser, manifest_path)
    if collector.violations:
        raise MarketDataError(collector.violations)

    surfaces_dir = os.path.join(root, bundle["surfaces"])
    slices = {}
    files = [manifest_path]
    for asset in assets + ((index,) if index else ()):
        surface_path = os.path.join(surfaces_dir, "{}.csv".format(asset))
        files.append(surface_path)
        for position, slice_ in _read_surface(
            collector, surface_path, asset, maturities, discounts, forwards[asset]
        ).items():
            slices[(asset, position)] = slice_
    correlation_path = os.path.join(root, bundle["correlation"])
    files.append(correlation_path)
    correlation = _read_correlation(collector, correlation_path, assets)
    if collector.violations:
        raise MarketDataError(collector.violations)

    return MarketBundle(
        assets=assets,
        maturities=tuple(maturities),
        discounts=tuple(discounts),
        weights=weights,
        slices=slices,
        correlation=correlation,
        index=index,
        jump_params=jump_params,
        checksums={
            os.path.relpath(file_, root): file_checksum(file_) for file_ in files
        },
        path=root,
    )


def _format(values):
    return " ".join(BUNDLE_FLOAT_FORMAT % value for value in values)


def write_bundle(bundle, path, surfaces="surfaces", correlation="correlation.csv"):
    """Write a bundle that :func:`load_bundle` reads back.

    Numbers are written with 12 significant digits.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str
    assets = list(bundle.assets) + ([bundle.index] if bundle.index else [])
    parser["bundle"] = {
        "assets": " ".join(bundle.assets),
        "maturities": _format(bundle.maturities),
        "discounts": _format(bundle.discounts),
        "correlation": correlation,
        "surfaces": surfaces,
    }
    if bundle.index:
        parser["bundle"]["index"] = bundle.index
    parser["weights"] = {
        asset: BUNDLE_FLOAT_FORMAT % bundle.weights[asset] for asset in bundle.assets
    }
    parser["forwards"] = {
        asset: _format(
            bundle.slices[(asset, position)].forward
            for position in range(len(bundle.maturities))
        )
        for asset in assets
    }
    if bundle.jump_params is not None:
        parser["jump"] = {
            key: BUNDLE_FLOAT_FORMAT % value
            for key, value in bundle.jump_params.to_dict().items()
        }
    try:
        os.makedirs(os.path.join(path, surfaces), exist_ok=True)
        with open(os.path.join(path, MANIFEST), "w") as file_:
            parser.write(file_)
        for asset in assets:
            rows = [
                (strike, bundle.maturities[position], vol)
                for position in range(len(bundle.maturities))
                for strike, vol in bundle.slices[(asset, position)].quotes
            ]
            pd.DataFrame(rows, columns=SURFACE_COLUMNS).to_csv(
                os.path.join(path, surfaces, "{}.csv".format(asset)),
                index=False,
                float_format=BUNDLE_FLOAT_FORMAT,
            )
        table = pd.DataFrame(
            bundle.correlation, index=bundle.assets, columns=bundle.assets
        )
        table.index.name = "asset"
        table.to_csv(
            os.path.join(path, correlation), float_format=BUNDLE_FLOAT_FORMAT
        )
    except OSError as error:
        raise SystemicSkewError("Cannot write bundle to {}: {}".format(path, error))


def write_skew_report(curves, path, moneyness, index_label="moneyness"):
    """Write curves on a common grid as a table with 6 significant digits.

    :param curves: Mapping of column label to values, written in order.
    :param path: Output file, or ``None`` to return the table as text.
    :param moneyness: Grid of the first column.
    """
    table = pd.DataFrame({index_label: np.asarray(moneyness, dtype=float)})
    for label, values in curves.items():
        table[label] = np.asarray(values, dtype=float)
    try:
        return table.to_csv(path, index=False, float_format=REPORT_FLOAT_FORMAT)
    except OSError as error:
        raise SystemicSkewError("Cannot write report {}: {}".format(path, error))


def read_skew_report(path, index_label="moneyness"):
    """Read a table written by :func:`write_skew_report`.

    :return: Grid and an ordered mapping of column label to values.
    """
    table = pd.read_csv(path)
    grid = table.pop(index_label).to_numpy()
    return grid, {label: table[label].to_numpy() for label in table.columns}


def write_json_report(data, path=None):
    """Write a JSON document with sorted keys, or return it when no path."""
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if path is None:
        return text
    try:
        with open(path, "w") as file_:
            file_.write(text)
    except OSError as error:
        raise SystemicSkewError("Cannot write report {}: {}".format(path, error))
    return text
