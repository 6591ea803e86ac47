"""Pairwise distance kernels and the Gini U-statistics built on them.

The sample categorical Gini covariance of a predictor ``X`` with labels
``Z`` is::

    gcov = Delta - sum_k p_k * Delta_k

where ``Delta`` is the mean of ``||X_i - X_j||`` over all pairs ``i < j``,
``Delta_k`` the same mean restricted to pairs inside class ``k`` and
``p_k = n_k / n``.  The categorical Gini correlation is ``gcov / Delta``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .core import DataError, DegeneratePredictorError, LabeledDataset


@dataclass(frozen=True)
class DistanceSums:
    """Pairwise distance sums of one sample.

    Attributes
    ----------
    total : float
        ``sum_{i<j} ||x_i - x_j||``.
    row_sums : ndarray, shape (n,)
        ``sum_{j != i} ||x_i - x_j||`` for every row ``i``.
    """
    total: float
    row_sums: np.ndarray


@dataclass(frozen=True)
class GiniEstimate:
    """Sample Gini mean difference decomposition of one predictor group."""
    delta: float
    class_deltas: np.ndarray
    class_props: np.ndarray
    gcov: float
    rho: float


def _check_rows(m):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 2:
        raise DataError(f"need at least 2 rows, got n={m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise DataError("matrix has non-finite entries")
    return m


def pairwise_distances(m) -> np.ndarray:
    """Full symmetric Euclidean distance matrix with an exactly zero diagonal."""
    m = _check_rows(m)
    return squareform(pdist(m, "euclidean"))


def distance_sums(m) -> DistanceSums:
    """Total and per-row sums of pairwise Euclidean distances.

    Examples
    --------
    >>> s = distance_sums([0.0, 1.0, 3.0])
    >>> s.total, s.row_sums.tolist()
    (6.0, [4.0, 3.0, 5.0])
    """
    m = _check_rows(m)
    condensed = pdist(m, "euclidean")
    rows = squareform(condensed).sum(axis=1)
    return DistanceSums(total=float(condensed.sum()), row_sums=rows)


def gmd(m) -> float:
    """Sample Gini mean difference: average distance over all unordered pairs."""
    m = _check_rows(m)
    n = m.shape[0]
    return float(pdist(m, "euclidean").sum()) / (n * (n - 1) / 2)


def _cached_distances(d, attr):
    cache = d._derived
    D = cache.get(attr)
    if D is None:
        D = pairwise_distances(getattr(d, attr))
        D.setflags(write=False)
        cache[attr] = D
    return D


def class_pair_sums(D, class_index):
    """Sum of distances over all pairs and over within-class pairs.

    Returns ``(total, within)`` where ``within[k]`` sums ``D[i, j]`` over
    ``i < j`` both in class ``k``.
    """
    total = D.sum() / 2.0
    within = np.array([D[np.ix_(idx, idx)].sum() / 2.0 for idx in class_index])
    return total, within


def estimate_from_distances(D, class_index, side=None) -> GiniEstimate:
    """Build a :class:`GiniEstimate` from a precomputed distance matrix."""
    n = D.shape[0]
    counts = np.array([len(idx) for idx in class_index], dtype=np.float64)
    total, within = class_pair_sums(D, class_index)
    delta = total / (n * (n - 1) / 2.0)
    class_deltas = within / (counts * (counts - 1) / 2.0)
    props = counts / n
    if not delta > 0.0:
        what = "predictor" if side is None else f"predictor group {side}"
        raise DegeneratePredictorError(
            f"{what} has zero Gini mean difference (all observations identical); "
            "the Gini correlation is undefined",
            side=side,
        )
    weighted = float(np.dot(props, class_deltas))
    # 1 - weighted * C(n, 2) / total avoids rounding delta before dividing
    rho = 1.0 - weighted * (n * (n - 1) / 2.0) / total
    return GiniEstimate(delta=delta, class_deltas=class_deltas, class_props=props,
                        gcov=delta - weighted, rho=rho)


def gini_correlation(d: LabeledDataset) -> GiniEstimate:
    """Sample categorical Gini correlation of ``d.features`` with ``d.labels``.

    Raises
    ------
    DegeneratePredictorError
        If all feature rows are identical, so the Gini mean difference is 0.

    Examples
    --------
    >>> est = gini_correlation(LabeledDataset([0, 0, 1, 1], ["a", "a", "b", "b"]))
    >>> round(est.rho, 12)
    1.0
    """
    D = _cached_distances(d, "features")
    return estimate_from_distances(D, d.class_index)


def _double_center(D):
    return D - D.mean(axis=0)[None, :] - D.mean(axis=1)[:, None] + D.mean()


def distance_correlation(x, y) -> float:
    """Biased (V-statistic) sample distance correlation between ``x`` and ``y``.

    Returns 0 when either sample is constant.
    """
    x = _check_rows(x)
    y = _check_rows(y)
    if x.shape[0] != y.shape[0]:
        raise DataError(f"x has {x.shape[0]} rows but y has {y.shape[0]}")
    A = _double_center(pairwise_distances(x))
    B = _double_center(pairwise_distances(y))
    dcov2 = (A * B).mean()
    dvar_x = (A * A).mean()
    dvar_y = (B * B).mean()
    if dvar_x <= 0.0 or dvar_y <= 0.0:
        return 0.0
    r2 = max(dcov2, 0.0) / np.sqrt(dvar_x * dvar_y)
    return float(min(np.sqrt(r2), 1.0))
