"""Data containers, CSV ingestion and the seeded random stream contract.

Every stochastic routine in the package takes an :class:`RngStream`.  A
stream is identified by ``(seed, stream_id)`` plus an optional parent path,
and is backed by numpy's counter-based Philox generator keyed through
:class:`numpy.random.SeedSequence`, so a given key always yields the same
draws no matter which process or thread consumes it.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence

import numpy as np


class CatGiniError(Exception):
    """Base class for all errors raised by the package."""


class DataError(CatGiniError, ValueError):
    """Input data violates a precondition (shape, class sizes, parsing)."""


class DegeneracyError(CatGiniError):
    """A statistic is undefined because the input is degenerate."""


class DegeneratePredictorError(DegeneracyError):
    """Gini mean difference is zero: every observation of a group is identical."""

    def __init__(self, message, side=None):
        super().__init__(message)
        self.side = side


class DegenerateVarianceError(DegeneracyError):
    """Estimated variance of the CGC difference is (numerically) zero."""


MIN_CLASS_SIZE = 2


def _as_matrix(a, name):
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise DataError(f"{name} must be a 1-D or 2-D array, got ndim={m.ndim}")
    if m.shape[1] < 1:
        raise DataError(f"{name} must have at least one column")
    if not np.all(np.isfinite(m)):
        bad = np.argwhere(~np.isfinite(m))[0]
        raise DataError(f"{name} has a non-finite entry at row {bad[0]}, column {bad[1]}")
    m = np.ascontiguousarray(m)
    m.setflags(write=False)
    return m


def _encode_labels(labels):
    """Map labels to dense codes 0..K-1 in order of first appearance."""
    labels = list(labels)
    classes = {}
    codes = np.empty(len(labels), dtype=np.intp)
    for i, lab in enumerate(labels):
        codes[i] = classes.setdefault(lab, len(classes))
    return tuple(classes), codes


class _Partition:
    """Class structure shared by both dataset types."""

    def __init__(self, labels, n):
        labels = list(labels.tolist() if isinstance(labels, np.ndarray) else labels)
        if len(labels) != n:
            raise DataError(f"got {len(labels)} labels for {n} rows")
        self.classes, codes = _encode_labels(labels)
        codes.setflags(write=False)
        self.codes = codes
        self.labels = tuple(labels)
        if len(self.classes) < 2:
            raise DataError(f"need at least 2 classes, got K={len(self.classes)}")
        counts = np.bincount(codes, minlength=len(self.classes))
        small = [c for c, nk in zip(self.classes, counts) if nk < MIN_CLASS_SIZE]
        if small:
            raise DataError(
                f"class size below {MIN_CLASS_SIZE} for class(es) {small!r}"
            )
        counts.setflags(write=False)
        self.class_counts = counts
        index = []
        for k in range(len(self.classes)):
            idx = np.flatnonzero(codes == k)
            idx.setflags(write=False)
            index.append(idx)
        self.class_index = tuple(index)


class LabeledDataset:
    """A numeric feature matrix paired with categorical labels.

    Parameters
    ----------
    features : array_like, shape (n, d) or (n,)
        Finite real features.  A 1-D array is treated as one column.
    labels : sequence, length n
        Arbitrary hashable class identifiers.  They are mapped to dense
        codes ``0..K-1`` by order of first appearance.

    Notes
    -----
    Instances are immutable; arrays are flagged read-only.  Requires
    ``K >= 2`` and at least two observations per class.
    """

    def __init__(self, features, labels):
        self.features = _as_matrix(features, "features")
        self._part = _Partition(labels, self.features.shape[0])
        self._derived = {}

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def labels(self) -> tuple:
        return self._part.labels

    @property
    def codes(self) -> np.ndarray:
        return self._part.codes

    @property
    def classes(self) -> tuple:
        return self._part.classes

    @property
    def n_classes(self) -> int:
        return len(self._part.classes)

    @property
    def class_index(self) -> tuple:
        return self._part.class_index

    @property
    def class_counts(self) -> np.ndarray:
        return self._part.class_counts

    @property
    def class_props(self) -> np.ndarray:
        return self.class_counts / self.n

    def __repr__(self):
        return (f"LabeledDataset(n={self.n}, d={self.d}, K={self.n_classes}, "
                f"class_counts={self.class_counts.tolist()})")


class PairedDataset:
    """Two predictor groups ``x`` (n x p) and ``y`` (n x q) with shared labels."""

    def __init__(self, x, y, labels):
        self.x = _as_matrix(x, "x")
        self.y = _as_matrix(y, "y")
        if self.x.shape[0] != self.y.shape[0]:
            raise DataError(
                f"x has {self.x.shape[0]} rows but y has {self.y.shape[0]}"
            )
        self._part = _Partition(labels, self.x.shape[0])
        self._derived = {}

    @property
    def n(self) -> int:
        return self.x.shape[0]

    labels = LabeledDataset.labels
    codes = LabeledDataset.codes
    classes = LabeledDataset.classes
    n_classes = LabeledDataset.n_classes
    class_index = LabeledDataset.class_index
    class_counts = LabeledDataset.class_counts
    class_props = LabeledDataset.class_props

    @property
    def p(self) -> int:
        return self.x.shape[1]

    @property
    def q(self) -> int:
        return self.y.shape[1]

    def x_part(self) -> LabeledDataset:
        return LabeledDataset(self.x, self.labels)

    def y_part(self) -> LabeledDataset:
        return LabeledDataset(self.y, self.labels)

    def swapped(self) -> "PairedDataset":
        return PairedDataset(self.y, self.x, self.labels)

    def __repr__(self):
        return (f"PairedDataset(n={self.n}, p={self.p}, q={self.q}, "
                f"K={self.n_classes}, class_counts={self.class_counts.tolist()})")


def concat_features(d: PairedDataset) -> LabeledDataset:
    """Stack both groups column-wise into one dataset ``[x | y]``."""
    return LabeledDataset(np.hstack([d.x, d.y]), d.labels)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _read_csv(path):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty; a header row is required")
    header, body = rows[0], rows[1:]
    body = [r for r in body if r]
    for i, r in enumerate(body):
        if len(r) != len(header):
            raise DataError(
                f"row {i + 1} has {len(r)} fields, header has {len(header)}"
            )
    return header, body


def _resolve_column(header, col):
    if isinstance(col, (int, np.integer)):
        if not 0 <= col < len(header):
            raise DataError(f"column index {col} out of range (0..{len(header) - 1})")
        return int(col)
    if col in header:
        return header.index(col)
    if isinstance(col, str) and col.strip().lstrip("-").isdigit():
        return _resolve_column(header, int(col))
    raise DataError(f"column {col!r} not found in header {header!r}")


def _parse_block(header, body, cols):
    out = np.empty((len(body), len(cols)), dtype=np.float64)
    for i, r in enumerate(body):
        for j, c in enumerate(cols):
            cell = r[c].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataError(
                    f"non-numeric value {cell!r} at row {i + 1}, column {header[c]!r}"
                ) from None
            if not math.isfinite(v):
                raise DataError(
                    f"non-finite value {cell!r} at row {i + 1}, column {header[c]!r}"
                )
            out[i, j] = v
    return out


def load_csv(path, label_column, feature_columns: Sequence | None = None) -> LabeledDataset:
    """Read a labeled dataset from a CSV file with a header row.

    ``label_column`` and entries of ``feature_columns`` may be header names
    or 0-based indices.  Without ``feature_columns`` every column except the
    label column is used.
    """
    header, body = _read_csv(path)
    lab = _resolve_column(header, label_column)
    if feature_columns is None:
        cols = [c for c in range(len(header)) if c != lab]
    else:
        cols = [_resolve_column(header, c) for c in feature_columns]
    if not cols:
        raise DataError("no feature columns selected")
    if lab in cols:
        raise DataError(f"label column {header[lab]!r} is also selected as a feature")
    feats = _parse_block(header, body, cols)
    return LabeledDataset(feats, [r[lab] for r in body])


def load_paired_csv(path, label_column, x_columns, y_columns) -> PairedDataset:
    """Read a two-group dataset; ``x_columns`` and ``y_columns`` must be disjoint."""
    header, body = _read_csv(path)
    lab = _resolve_column(header, label_column)
    xc = [_resolve_column(header, c) for c in (x_columns or [])]
    yc = [_resolve_column(header, c) for c in (y_columns or [])]
    if not xc:
        raise DataError("p must be >= 1: no x columns selected")
    if not yc:
        raise DataError("q must be >= 1: no y columns selected")
    overlap = sorted(set(xc) & set(yc))
    if overlap:
        raise DataError(
            f"x and y column sets overlap: {[header[c] for c in overlap]!r}"
        )
    if lab in xc or lab in yc:
        raise DataError(f"label column {header[lab]!r} is also selected as a feature")
    x = _parse_block(header, body, xc)
    y = _parse_block(header, body, yc)
    return PairedDataset(x, y, [r[lab] for r in body])


def write_csv(d: LabeledDataset, path, feature_names=None, label_name="label"):
    """Write ``d`` as CSV with the label in the first column.

    Floats are written with ``repr`` so that reloading is bit-exact.
    """
    if feature_names is None:
        feature_names = [f"x{j + 1}" for j in range(d.d)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([label_name, *feature_names])
        for lab, row in zip(d.labels, d.features):
            w.writerow([lab, *(repr(float(v)) for v in row)])


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

class RngStream:
    """A reproducible, splittable random stream.

    Parameters
    ----------
    seed : int
        Non-negative 64-bit experiment seed.
    stream_id : int
        Non-negative stream index.  Distinct ids give independent streams.
    parent : tuple of int, optional
        Key path of the stream this one was split from.

    Examples
    --------
    >>> a = RngStream(0, 3).generator.standard_normal(2)
    >>> b = RngStream(0, 3).generator.standard_normal(2)
    >>> bool((a == b).all())
    True
    """

    def __init__(self, seed: int, stream_id: int = 0, parent: tuple = ()):
        seed, stream_id = int(seed), int(stream_id)
        if not 0 <= seed < 2**64 or not 0 <= stream_id < 2**64:
            raise ValueError("seed and stream_id must be 64-bit non-negative integers")
        self.seed = seed
        self.stream_id = stream_id
        self.key = tuple(parent) + (stream_id,)
        ss = np.random.SeedSequence(entropy=seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.Philox(ss))

    def substream(self, stream_id: int) -> "RngStream":
        """Independent child stream, keyed by this stream's path plus ``stream_id``."""
        return RngStream(self.seed, stream_id, parent=self.key)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"


def as_stream(rng) -> RngStream:
    """Coerce ``None``/int/RngStream to an :class:`RngStream` (``None`` means seed 0)."""
    if rng is None:
        return RngStream(0)
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"expected RngStream or int seed, got {type(rng).__name__}")
