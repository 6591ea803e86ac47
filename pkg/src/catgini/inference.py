"""Tests comparing the categorical Gini correlations of two predictor groups.

All tests are one-sided::

    H0: rho_g(X, Z) = rho_g(Y, Z)   vs   H1: rho_g(X, Z) > rho_g(Y, Z)

with statistic ``D_n = rho1_hat - rho2_hat``.  To test the other direction,
swap the groups (:meth:`PairedDataset.swapped`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr, ndtri

from .core import (
    DataError,
    DegeneratePredictorError,
    DegenerateVarianceError,
    LabeledDataset,
    PairedDataset,
    as_stream,
    concat_features,
)
from .gini import _cached_distances, estimate_from_distances

HYPOTHESIS = "H0: rho_g(X,Z) = rho_g(Y,Z)  vs  H1: rho_g(X,Z) > rho_g(Y,Z)"
ADDED_VALUE_HYPOTHESIS = (
    "H0: rho_g(W,Z) = rho_g(X,Z)  vs  H1: rho_g(W,Z) > rho_g(X,Z),  W = (X, Y)"
)
EPS_DEGENERATE = 1e-14
METHODS = ("asN", "bootstrap", "projection")


class CGCDifference(NamedTuple):
    rho1_hat: float
    rho2_hat: float
    d_n: float


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of a normal-approximation comparison test.

    ``variance_hat`` estimates ``var(rho1_hat - rho2_hat)``: the jackknife
    estimate for ``asN``, the projection plug-in divided by ``n`` for
    ``projection``.
    """
    rho1_hat: float
    rho2_hat: float
    d_n: float
    variance_hat: float
    z_score: float
    p_value: float
    method: str
    alpha: float
    reject: bool


@dataclass(frozen=True)
class BootstrapResult:
    """Outcome of the class-stratified bootstrap test.

    ``replicates`` holds the centered differences ``d_b = u_b - mean(u)``
    and ``p_value`` is the fraction of them at or above ``d0``.
    """
    d0: float
    replicates: np.ndarray
    p_value: float
    b: int
    rho1_hat: float
    rho2_hat: float
    u_mean: float
    method: str = "bootstrap"

    def reject(self, alpha: float) -> bool:
        return bool(self.p_value <= alpha)


@dataclass(frozen=True)
class PermutationResult:
    rho_hat: float
    replicates: np.ndarray
    p_value: float


def _distances(d: PairedDataset):
    return _cached_distances(d, "x"), _cached_distances(d, "y")


def cgc_difference(d: PairedDataset) -> CGCDifference:
    """Sample Gini correlations of both groups and their difference ``D_n``."""
    Dx, Dy = _distances(d)
    r1 = estimate_from_distances(Dx, d.class_index, side="X").rho
    r2 = estimate_from_distances(Dy, d.class_index, side="Y").rho
    return CGCDifference(r1, r2, r1 - r2)


# ---------------------------------------------------------------------------
# Jackknife
# ---------------------------------------------------------------------------

def _delete_one_rhos(D, codes, class_index, side):
    """Gini correlation of every delete-one subsample, in O(n^2) total.

    Deleting row ``i`` of class ``c`` removes ``row_sums[i]`` from the total
    pair sum and the within-class row sum from class ``c``'s pair sum; the
    other classes are untouched.
    """
    n = D.shape[0]
    counts = np.array([len(idx) for idx in class_index], dtype=np.float64)
    row = D.sum(axis=1)
    total = row.sum() / 2.0
    row_in = np.empty(n)
    within = np.empty(len(class_index))
    for k, idx in enumerate(class_index):
        s = D[np.ix_(idx, idx)].sum(axis=1)
        row_in[idx] = s
        within[k] = s.sum() / 2.0
    nk = counts[codes]
    delta_del = (total - row) / ((n - 1) * (n - 2) / 2.0)
    class_delta = within / (counts * (counts - 1) / 2.0)
    class_delta_del = (within[codes] - row_in) / ((nk - 1) * (nk - 2) / 2.0)
    weighted = float(np.dot(counts, class_delta))
    w_del = (weighted - nk * class_delta[codes] + (nk - 1) * class_delta_del) / (n - 1)
    if not np.all(delta_del > 0.0):
        i = int(np.flatnonzero(~(delta_del > 0.0))[0])
        raise DegeneratePredictorError(
            f"predictor group {side} is degenerate after deleting observation {i}",
            side=side,
        )
    return 1.0 - w_del / delta_del


def _check_jackknife_sizes(d):
    small = [c for c, nk in zip(d.classes, d.class_counts) if nk < 3]
    if small:
        raise DataError(
            "jackknife needs at least 3 observations per class so every "
            f"delete-one sample keeps 2; too small: {small!r}"
        )


def jackknife_replicates(d: PairedDataset) -> np.ndarray:
    """Delete-one values of ``D_n``, one per observation."""
    _check_jackknife_sizes(d)
    Dx, Dy = _distances(d)
    return (_delete_one_rhos(Dx, d.codes, d.class_index, "X")
            - _delete_one_rhos(Dy, d.codes, d.class_index, "Y"))


def jackknife_variance(d: PairedDataset) -> float:
    """Jackknife estimate ``((n-1)/n) * sum_i (delta_i - mean(delta))^2``."""
    reps = jackknife_replicates(d)
    n = reps.shape[0]
    dev = reps - reps.mean()
    return float((n - 1) / n * np.dot(dev, dev))


def _normal_result(est, variance, method, alpha, eps):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not variance > eps:
        raise DegenerateVarianceError(
            f"estimated variance of D_n is {variance:.3g} <= {eps:g}; the two "
            "groups look perfectly linearly dependent (Y = aX + b), so the "
            "normal approximation is degenerate"
        )
    se = float(np.sqrt(variance))
    z = est.d_n / se
    z_alpha = float(ndtri(1.0 - alpha))
    return ComparisonResult(
        rho1_hat=est.rho1_hat, rho2_hat=est.rho2_hat, d_n=est.d_n,
        variance_hat=float(variance), z_score=float(z),
        p_value=float(min(max(1.0 - ndtr(z), 0.0), 1.0)),
        method=method, alpha=float(alpha), reject=bool(est.d_n > z_alpha * se),
    )


def asn_test(d: PairedDataset, alpha: float = 0.05,
             eps: float = EPS_DEGENERATE) -> ComparisonResult:
    """Jackknife-studentized asymptotic normal test.

    Rejects when ``D_n > z_alpha * sqrt(M)`` with ``M`` the jackknife
    variance and ``z_alpha`` the upper ``alpha`` normal quantile.

    Raises
    ------
    DegenerateVarianceError
        If ``M <= eps``.
    """
    est = cgc_difference(d)
    return _normal_result(est, jackknife_variance(d), "asN", alpha, eps)


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------

def _resample_weights(gen, class_index, n, b):
    """Multiplicity of each original row in ``b`` within-class resamples."""
    offsets = (np.arange(b) * n)[:, None]
    flat = [(idx[gen.integers(0, len(idx), size=(b, len(idx)))] + offsets).ravel()
            for idx in class_index]
    w = np.bincount(np.concatenate(flat), minlength=b * n)
    return w.reshape(b, n).astype(np.float64)


def _weighted_rhos(D, class_index, w):
    """Gini correlation of each resample encoded by multiplicity weights.

    Copies of one row are at distance 0, so the pair sum of a resample is
    ``w @ D @ w / 2`` and the within-class pair sums use the diagonal blocks.
    """
    n = D.shape[0]
    counts = np.array([len(idx) for idx in class_index], dtype=np.float64)
    total = np.einsum("bi,bi->b", w @ D, w) / 2.0
    weighted = np.zeros(w.shape[0])
    for k, idx in enumerate(class_index):
        wk = w[:, idx]
        sk = np.einsum("bi,bi->b", wk @ D[np.ix_(idx, idx)], wk) / 2.0
        weighted += (counts[k] / n) * sk / (counts[k] * (counts[k] - 1) / 2.0)
    delta = total / (n * (n - 1) / 2.0)
    ok = delta > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(ok, 1.0 - weighted / np.where(ok, delta, 1.0), np.nan)
    return rho, ok


def bootstrap_test(d: PairedDataset, b: int = 1000, rng=None,
                   max_retries: int = 100, chunk: int = 256) -> BootstrapResult:
    """Class-stratified bootstrap test.

    Each replicate resamples every class with replacement to its original
    size, keeping each ``(x_i, y_i)`` pair together, and records
    ``u_b = rho1_b - rho2_b``.  The p-value is the fraction of centered
    replicates ``u_b - mean(u)`` at or above the observed ``D_n``.

    A replicate whose resampled ``x`` or ``y`` rows are all identical has
    no defined correlation; it is redrawn, at most ``max_retries`` times.

    Parameters
    ----------
    d : PairedDataset
    b : int
        Number of bootstrap replicates.
    rng : RngStream or int, optional
        Random stream; all resamples are drawn from it in replicate order.
    """
    b = int(b)
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    gen = as_stream(rng).generator
    est = cgc_difference(d)
    Dx, Dy = _distances(d)
    u = np.empty(b)
    for start in range(0, b, chunk):
        m = min(chunk, b - start)
        w = _resample_weights(gen, d.class_index, d.n, m)
        r1, ok1 = _weighted_rhos(Dx, d.class_index, w)
        r2, ok2 = _weighted_rhos(Dy, d.class_index, w)
        bad = np.flatnonzero(~(ok1 & ok2))
        for j in bad:
            for _ in range(max_retries):
                wj = _resample_weights(gen, d.class_index, d.n, 1)
                a1, o1 = _weighted_rhos(Dx, d.class_index, wj)
                a2, o2 = _weighted_rhos(Dy, d.class_index, wj)
                if o1[0] and o2[0]:
                    r1[j], r2[j] = a1[0], a2[0]
                    break
            else:
                raise DegeneratePredictorError(
                    f"bootstrap replicate {start + j} stayed degenerate after "
                    f"{max_retries} redraws"
                )
        u[start:start + m] = r1 - r2
    u_mean = float(u.mean())
    reps = u - u_mean
    p = np.count_nonzero(reps >= est.d_n) / b
    return BootstrapResult(d0=est.d_n, replicates=reps, p_value=float(p), b=b,
                           rho1_hat=est.rho1_hat, rho2_hat=est.rho2_hat,
                           u_mean=u_mean)


# ---------------------------------------------------------------------------
# Added value and independence
# ---------------------------------------------------------------------------

def added_value_pair(d: PairedDataset) -> PairedDataset:
    """The pair ``(W, X)`` with ``W = [x | y]``, for testing what ``y`` adds."""
    w = concat_features(d)
    return PairedDataset(w.features, d.x, d.labels)


def added_value_test(d: PairedDataset, method: str = "asN", alpha: float = 0.05,
                     b: int = 1000, rng=None):
    """Test whether ``y`` adds marginal association with the labels beyond ``x``.

    Compares ``rho_g(W, Z)`` with ``rho_g(X, Z)`` for ``W = (X, Y)`` using
    the chosen ``method``; a small p-value means ``y`` carries extra
    information.
    """
    pair = added_value_pair(d)
    if method == "asN":
        return asn_test(pair, alpha)
    if method == "bootstrap":
        return bootstrap_test(pair, b, rng)
    if method == "projection":
        return projection_test(pair, alpha)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def _rhos_for_codes(D, code_rows, counts):
    """Gini correlation of ``D`` under each row of class codes."""
    n = D.shape[0]
    delta = D.sum() / (n * (n - 1))
    weighted = np.zeros(code_rows.shape[0])
    for k, nk in enumerate(counts):
        ind = (code_rows == k).astype(np.float64)
        sk = np.einsum("ri,ri->r", ind @ D, ind) / 2.0
        weighted += (nk / n) * sk / (nk * (nk - 1) / 2.0)
    return 1.0 - weighted / delta


def permutation_independence_test(d: LabeledDataset, r: int = 999,
                                  rng=None) -> PermutationResult:
    """Permutation test of zero Gini correlation between features and labels.

    The p-value is ``(1 + #{rho_perm >= rho_obs}) / (r + 1)``.
    """
    r = int(r)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    gen = as_stream(rng).generator
    D = _cached_distances(d, "features")
    rho_obs = estimate_from_distances(D, d.class_index).rho
    counts = d.class_counts.astype(np.float64)
    codes = np.asarray(d.codes)
    perms = np.stack([codes[gen.permutation(d.n)] for _ in range(r)])
    # observed value goes through the same arithmetic so ties compare exactly
    rhos = _rhos_for_codes(D, np.vstack([codes[None, :], perms]), counts)
    rho_ref, reps = rhos[0], rhos[1:]
    p = (1 + np.count_nonzero(reps >= rho_ref)) / (r + 1)
    return PermutationResult(rho_hat=rho_obs, replicates=reps, p_value=float(p))


# ---------------------------------------------------------------------------
# Projection plug-in variance
# ---------------------------------------------------------------------------

def _centered_class_means(D, class_index):
    """Per-observation mean distances to each class, centered within class.

    ``out[k]`` has shape ``(n_k, K)``; column ``l`` holds
    ``mean_{j in l, j != i} D[i, j] - Delta_kl`` for each observation ``i``
    of class ``k``, where ``Delta_kl`` is the mean cross-class distance
    (the within-class Gini mean difference when ``l == k``).
    """
    K = len(class_index)
    out = []
    for k, ik in enumerate(class_index):
        nk = len(ik)
        cols = np.empty((nk, K))
        for l, il in enumerate(class_index):
            if l == k:
                g = D[np.ix_(ik, ik)].sum(axis=1) / (nk - 1)
            else:
                g = D[np.ix_(ik, il)].mean(axis=1)
            cols[:, l] = g - g.mean()
        out.append(cols)
    return out


def _pair_brackets(C):
    """``g_kl - g_kk - Delta_kl + Delta_k`` for every class pair, zero on ``l == k``."""
    return [c - c[:, [k]] for k, c in enumerate(C)]


def projection_kernels(d: PairedDataset):
    """Plug-in first-order projections of the comparison kernel.

    Returns a list whose ``k``-th entry is an ``(n_k, K)`` array: column
    ``l`` is the estimated projection for the class pair ``(k, l)``
    evaluated at each observation of class ``k``.  Within-class
    expectations leave the observation itself out.
    """
    Dx, Dy = _distances(d)
    ex = estimate_from_distances(Dx, d.class_index, side="X")
    ey = estimate_from_distances(Dy, d.class_index, side="Y")
    bx = _pair_brackets(_centered_class_means(Dx, d.class_index))
    by = _pair_brackets(_centered_class_means(Dy, d.class_index))
    return [a / (2.0 * ex.delta) - c / (2.0 * ey.delta) for a, c in zip(bx, by)]


def _full_influence(D, class_index, est, p):
    C = _centered_class_means(D, class_index)
    return [((c - c[:, [k]]) @ p - est.rho * (c @ p)) / est.delta
            for k, c in enumerate(C)]


def projection_variance(d: PairedDataset, form: str = "pairwise") -> float:
    """Plug-in estimate of the asymptotic variance of ``sqrt(n) * D_n``.

    ``form="pairwise"`` weights each class pair separately::

        16 * sum_{k != l} (p_k^2 p_l + p_l^2 p_k) * var_i(h_kl(i))

    ``form="hajek"`` is the variance of the first-order projection of
    ``D_n`` with the Gini mean differences in the denominators held fixed,
    ``16 * sum_k p_k * var_i(sum_{l != k} p_l h_kl(i))``, which keeps the
    covariance between class pairs sharing a class.

    ``form="full"`` also linearizes the estimated denominators, i.e. it is
    the delta-method variance of ``rho1_hat - rho2_hat``.

    Divide by ``n`` to estimate ``var(D_n)``.
    """
    p = d.class_props
    if form == "full":
        Dx, Dy = _distances(d)
        ex = estimate_from_distances(Dx, d.class_index, side="X")
        ey = estimate_from_distances(Dy, d.class_index, side="Y")
        ax = _full_influence(Dx, d.class_index, ex, p)
        ay = _full_influence(Dy, d.class_index, ey, p)
        return float(4.0 * sum(p[k] * (a - b).var(ddof=1)
                               for k, (a, b) in enumerate(zip(ax, ay))))
    h = projection_kernels(d)
    K = len(h)
    if form == "pairwise":
        s = 0.0
        for k in range(K):
            for l in range(K):
                if l != k:
                    s += (p[k] ** 2 * p[l] + p[l] ** 2 * p[k]) * h[k][:, l].var(ddof=1)
        return float(16.0 * s)
    if form == "hajek":
        return float(16.0 * sum(p[k] * (h[k] @ p).var(ddof=1) for k in range(K)))
    raise ValueError(f"unknown form {form!r}; expected 'pairwise', 'hajek' or 'full'")


def projection_test(d: PairedDataset, alpha: float = 0.05, form: str = "pairwise",
                    eps: float = EPS_DEGENERATE) -> ComparisonResult:
    """Normal test studentized by the projection plug-in variance."""
    est = cgc_difference(d)
    var = projection_variance(d, form) / d.n
    return _normal_result(est, var, "projection", alpha, eps)
