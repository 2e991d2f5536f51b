"""Comparison screening statistics: ANOVA R^2, the MV index and DT.

DT is the sample distance correlation between a numeric group and the
labels, with the 0/1 set-difference metric on the labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import DataError, Measure
from .gdc import encode_categories


@dataclass(frozen=True)
class BaselineStat:
    value: float
    measure_id: Measure
    degenerate: bool = False


class ColumnStats(NamedTuple):
    values: np.ndarray
    degenerate: np.ndarray


def _prepare(feature, labels):
    x = np.asarray(feature, dtype=np.float64).ravel()
    codes, k = encode_categories(labels)
    if codes.shape[0] != x.shape[0]:
        raise DataError("feature and labels must have the same length")
    if x.shape[0] < 2:
        raise DataError("need n >= 2")
    if k < 2:
        raise DataError("only one class in labels")
    if not np.all(np.isfinite(x)):
        raise DataError("feature must be finite")
    return x[:, None], codes, k


# ------------------------------------------------------------------- R^2


def r2_columns(X, labels, n_classes) -> ColumnStats:
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    mean = X.mean(axis=0)
    tss = ((X - mean) ** 2).sum(axis=0)
    between = np.zeros(X.shape[1])
    for k in range(n_classes):
        rows = labels == k
        nk = np.count_nonzero(rows)
        if nk:
            between += nk * (X[rows].mean(axis=0) - mean) ** 2
    degenerate = np.ptp(X, axis=0) == 0 if n else np.ones(X.shape[1], bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(degenerate, 0.0, between / np.where(degenerate, 1.0, tss))
    return ColumnStats(np.clip(r2, 0.0, 1.0), degenerate)


def r2_anova(feature, labels) -> BaselineStat:
    """Between-class over total sum of squares of a single feature.

    A constant feature yields 0 with ``degenerate`` set.
    """
    X, codes, k = _prepare(feature, labels)
    r = r2_columns(X, codes, k)
    return BaselineStat(float(r.values[0]), Measure.R2, bool(r.degenerate[0]))


# -------------------------------------------------------------------- MV


def mv_columns(X, labels, n_classes) -> ColumnStats:
    """MV index of every column by one sort per column, O(n log n).

    ``F(x_j)`` counts sample values ``<= x_j``, so tied values are all
    evaluated at the end of their tie block.
    """
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ls = labels[order]
    # index of the last row of each tie block, per position
    idx = np.broadcast_to(np.arange(n)[:, None], (n, p))
    is_last = np.ones((n, p), dtype=bool)
    is_last[:-1] = xs[1:] != xs[:-1]
    end = np.where(is_last, idx, n - 1)
    end = np.minimum.accumulate(end[::-1], axis=0)[::-1]
    F = (end + 1) / n
    counts = np.bincount(labels, minlength=n_classes)
    total = np.zeros(p)
    for k in range(n_classes):
        if counts[k] == 0:
            continue
        ck = np.cumsum(ls == k, axis=0)
        Fk = np.take_along_axis(ck, end, axis=0) / counts[k]
        # row-wise sums over a transposed copy use the same pairwise
        # summation as a single column, so batch width never changes a value
        sq = np.ascontiguousarray(((Fk - F) ** 2).T)
        total += (counts[k] / n) * sq.sum(axis=1)
    degenerate = np.ptp(X, axis=0) == 0
    return ColumnStats(total / n, degenerate)


def mv_index(feature, labels) -> BaselineStat:
    """Weighted Cramer-von Mises distance between class and pooled ECDFs.

    ``(1/n) sum_j sum_k p_k (F_k(x_j) - F(x_j))^2`` over the sample points.
    """
    X, codes, k = _prepare(feature, labels)
    r = mv_columns(X, codes, k)
    return BaselineStat(float(r.values[0]), Measure.MV, bool(r.degenerate[0]))


# -------------------------------------------------------------------- DT


def centered_label_distances(labels) -> np.ndarray:
    """Double-centered 0/1 distance matrix of the labels."""
    y = np.asarray(labels)
    b = (y[:, None] != y[None, :]).astype(np.float64)
    rmean = b.mean(axis=1)
    return np.ascontiguousarray(b - rmean[:, None] - rmean[None, :] + b.mean())


def _dcor(X, Bc, bb) -> tuple[float, bool]:
    ab, aa = kernels.centered_distance_moments(np.ascontiguousarray(X), Bc)
    if aa <= 0 or bb <= 0:
        return 0.0, True
    dcov2 = max(ab, 0.0)
    return min(math.sqrt(dcov2 / math.sqrt(aa * bb)), 1.0), False


class DistanceCorrelation:
    """DT statistic for many groups sharing one label vector.

    The centered label matrix is built once; call with an ``n x q`` group.
    """

    def __init__(self, labels):
        self.Bc = centered_label_distances(labels)
        self.bb = math.fsum((self.Bc * self.Bc).ravel())

    def __call__(self, X) -> tuple[float, bool]:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if np.all(np.ptp(X, axis=0) == 0):
            return 0.0, True
        return _dcor(X, self.Bc, self.bb)


def dt_columns(X, labels, n_classes=None) -> ColumnStats:
    X = np.asarray(X, dtype=np.float64)
    dt = DistanceCorrelation(labels)
    vals = np.zeros(X.shape[1])
    deg = np.zeros(X.shape[1], dtype=bool)
    for j in range(X.shape[1]):
        vals[j], deg[j] = dt(X[:, j : j + 1])
    return ColumnStats(vals, deg)


def distance_correlation_categorical(group_columns, labels) -> BaselineStat:
    """Sample (V-statistic) distance correlation with the set-difference label metric.

    Returns 0 with ``degenerate`` set when the group or the labels are constant.
    """
    X = np.asarray(group_columns, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    codes, k = encode_categories(labels)
    if X.shape[0] != codes.shape[0]:
        raise DataError("group and labels must have the same length")
    if X.shape[0] < 3:
        raise DataError("need n >= 3")
    if not np.all(np.isfinite(X)):
        raise DataError("group must be finite")
    if k < 2:
        return BaselineStat(0.0, Measure.DT, True)
    value, degenerate = DistanceCorrelation(codes)(X)
    return BaselineStat(value, Measure.DT, degenerate)


def dt_categorical_predictors(response, Z) -> ColumnStats:
    """DT of a numeric response against every categorical column of ``Z``.

    With ``A`` the double-centered distance matrix of the response (its
    entries sum to zero), ``sum(A * Bc) = -sum_c 1_c' A 1_c`` over the level
    indicator vectors ``1_c`` of a column, and ``sum(Bc * Bc)`` depends only
    on the level counts. One matrix product per level value covers all
    columns.
    """
    y = np.asarray(response, dtype=np.float64).ravel()
    Z = np.asarray(Z)
    n, p = Z.shape
    dist = np.abs(y[:, None] - y[None, :])
    rmean = dist.mean(axis=1)
    A = dist - rmean[:, None] - rmean[None, :] + dist.mean()
    aa = math.fsum((A * A).ravel())
    ab = np.zeros(p)
    sq = np.zeros(p)
    cube = np.zeros(p)
    for v in np.unique(Z):
        M = (Z == v).astype(np.float64)
        ab -= (M * (A @ M)).sum(axis=0)
        cnt = M.sum(axis=0)
        sq += cnt**2
        cube += cnt**3
    bb = sq - 2.0 * cube / n + sq**2 / n**2
    degenerate = (bb <= 0) | (aa <= 0) | (np.ptp(Z, axis=0) == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.sqrt(np.maximum(ab, 0.0) / np.sqrt(aa * np.where(degenerate, 1.0, bb)))
    vals = np.where(degenerate, 0.0, np.minimum(vals, 1.0))
    return ColumnStats(vals, degenerate)
