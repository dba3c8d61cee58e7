"""Immutable data tables, feature-subspace partitions, and CSV ingestion.

A :class:`Dataset` is a validated numeric table (samples x features) with
named columns. A :class:`SubspaceConfig` partitions the columns into named,
pairwise-disjoint subspaces; columns not claimed by any subspace form the
leftover block. Projections pull out the sample matrix restricted to one
subspace.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyDataError, ParseError, SchemaError


@dataclass(frozen=True)
class Dataset:
    """Immutable table of n_samples x n_features finite floats with unique column names."""

    values: np.ndarray
    column_names: tuple[str, ...]
    standardized: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise SchemaError(f"expected a 2-D table, got ndim={values.ndim}")
        n, d = values.shape
        if n < 1 or d < 1:
            raise EmptyDataError(f"dataset must have at least one row and one column, got {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ParseError(f"non-finite value at row {bad[0]}, column index {bad[1]}")
        names = tuple(str(c) for c in self.column_names)
        if len(names) != d:
            raise SchemaError(f"{len(names)} column names for {d} columns")
        if len(set(names)) != len(names):
            dupes = sorted({c for c in names if names.count(c) > 1})
            raise SchemaError(f"duplicate column names: {dupes}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", names)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise SchemaError(f"no column named {name!r}; have {list(self.column_names)}") from None


@dataclass(frozen=True)
class SubspaceConfig:
    """Named, disjoint groups of column indices; unclaimed columns are leftover.

    ``columns[k]`` lists the column indices of subspace ``k`` in declaration
    order, which is also the column order of its projections.
    """

    names: tuple[str, ...]
    columns: tuple[tuple[int, ...], ...]
    n_features: int
    leftover: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        columns = tuple(tuple(int(i) for i in cols) for cols in self.columns)
        if len(names) != len(columns):
            raise ConfigError(f"{len(names)} subspace names for {len(columns)} column groups")
        if len(columns) < 1:
            raise ConfigError("at least one subspace is required")
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate subspace names: {names}")
        seen: set[int] = set()
        for name, cols in zip(names, columns):
            if len(cols) < 1:
                raise ConfigError(f"subspace {name!r} is empty")
            for i in cols:
                if not 0 <= i < self.n_features:
                    raise ConfigError(f"subspace {name!r} references column {i}, valid range is 0..{self.n_features - 1}")
                if i in seen:
                    raise ConfigError(f"column {i} appears in more than one subspace")
                seen.add(i)
        leftover = tuple(i for i in range(self.n_features) if i not in seen)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "leftover", leftover)

    @property
    def n_subspaces(self) -> int:
        return len(self.columns)

    @property
    def dims(self) -> tuple[int, ...]:
        """Dimension of each subspace, in declaration order."""
        return tuple(len(cols) for cols in self.columns)

    @classmethod
    def from_column_names(cls, groups, column_names) -> "SubspaceConfig":
        """Build from ``[(name, [column name, ...]), ...]`` resolved against ``column_names``."""
        column_names = list(column_names)
        index = {c: i for i, c in enumerate(column_names)}
        names, columns = [], []
        for name, cols in groups:
            resolved = []
            for c in cols:
                if c not in index:
                    raise SchemaError(f"subspace {name!r} references unknown column {c!r}")
                resolved.append(index[c])
            names.append(name)
            columns.append(tuple(resolved))
        return cls(tuple(names), tuple(columns), n_features=len(column_names))

    @classmethod
    def from_json(cls, doc, column_names) -> "SubspaceConfig":
        """Parse ``{"subspaces": [{"name": ..., "columns": [...]}, ...]}``.

        Column names not listed in any subspace become leftover features.
        """
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        if not isinstance(doc, dict) or "subspaces" not in doc:
            raise SchemaError('subspace config must be an object with a "subspaces" key')
        groups = []
        for entry in doc["subspaces"]:
            if "name" not in entry or "columns" not in entry:
                raise SchemaError('each subspace needs "name" and "columns"')
            groups.append((entry["name"], list(entry["columns"])))
        return cls.from_column_names(groups, column_names)

    def to_json_dict(self, column_names) -> dict:
        column_names = list(column_names)
        return {
            "subspaces": [
                {"name": name, "columns": [column_names[i] for i in cols]}
                for name, cols in zip(self.names, self.columns)
            ]
        }


@dataclass(frozen=True)
class BoundingBox:
    """Per-column closed interval [lower, upper]."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ConfigError(f"mismatched bounds: {lower.shape} vs {upper.shape}")
        if np.any(lower > upper):
            raise ConfigError("bounding box with lower > upper")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def range(self) -> np.ndarray:
        return self.upper - self.lower


def load_csv(path, config=None, standardize: bool = False) -> Dataset:
    """Read a comma-delimited, header-first CSV into a validated Dataset.

    ``config`` may be a SubspaceConfig, a JSON string, or a dict in the
    subspace-config schema; it is checked against the header so that missing
    columns fail here rather than later. ``standardize`` min-max scales each
    column onto [0, 1] (constant columns map to 0).
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({c for c in header if header.count(c) > 1})
            raise SchemaError(f"{path}: duplicate header columns {dupes}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            parsed = []
            for name, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: column {name!r}: cannot parse {cell!r}") from None
                if not math.isfinite(value):
                    raise ParseError(f"{path}:{lineno}: column {name!r}: non-finite value {cell!r}")
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    values = np.asarray(rows, dtype=float)

    if config is not None:
        if isinstance(config, SubspaceConfig):
            if config.n_features != len(header):
                raise SchemaError(f"subspace config expects {config.n_features} columns, file has {len(header)}")
        else:
            SubspaceConfig.from_json(config, header)

    if standardize:
        lo = values.min(axis=0)
        span = values.max(axis=0) - lo
        safe = np.where(span > 0, span, 1.0)
        values = np.where(span > 0, (values - lo) / safe, 0.0)
    return Dataset(values, tuple(header), standardized=standardize)


def write_csv(dataset: Dataset, path) -> None:
    """Write the dataset back out with 17 significant digits (value round-trip)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.column_names)
        for row in dataset.values:
            writer.writerow([f"{v:.17g}" for v in row])


def project(dataset: Dataset, config: SubspaceConfig, subspace_index: int) -> np.ndarray:
    """Sample matrix restricted to one subspace, columns in declaration order."""
    if not 0 <= subspace_index < config.n_subspaces:
        raise IndexError(f"subspace index {subspace_index} out of range 0..{config.n_subspaces - 1}")
    return dataset.values[:, list(config.columns[subspace_index])]


def bounding_box(dataset: Dataset, columns) -> BoundingBox:
    """Exact per-column min/max over all samples for the given column indices."""
    columns = list(columns)
    if not columns:
        raise ConfigError("bounding_box needs at least one column")
    sub = dataset.values[:, columns]
    return BoundingBox(sub.min(axis=0), sub.max(axis=0))
