"""Gini distance covariance and correlation with a categorical variable.

For a feature group ``X`` and labels ``Y`` with class proportions ``p_k``::

    gCov = Delta - sum_k p_k * Delta_k
    gCor = gCov / Delta

where ``Delta`` is the GMD of the pooled sample and ``Delta_k`` the GMD
within class ``k``. Sample correlations are not clamped at zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import DataError, Dataset
from .gmd import gmd_pairwise, gmd_sorted_columns, ordered_sum_columns


@dataclass(frozen=True)
class GdcStat:
    covariance: float
    correlation: float
    total_gmd: float
    within_gmd: float
    degenerate: bool
    warnings: tuple[str, ...] = ()


def _correlation(total, within):
    total = np.asarray(total, dtype=np.float64)
    cov = total - within
    degenerate = total == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(degenerate, 0.0, cov / np.where(degenerate, 1.0, total))
    return cov, corr, degenerate


class GdcColumns(NamedTuple):
    total: np.ndarray
    within: np.ndarray
    covariance: np.ndarray
    correlation: np.ndarray
    degenerate: np.ndarray
    warnings: tuple[str, ...]


def gdc_columns(X: np.ndarray, labels: np.ndarray, n_classes: int) -> GdcColumns:
    """Marginal GDC of every column of ``X`` (O(n log n) per column).

    Each column is handled independently, so splitting ``X`` into column
    blocks gives bit-identical results.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    total = gmd_sorted_columns(np.sort(X, axis=0))
    terms = np.zeros((n_classes, X.shape[1]))
    warnings = []
    for k in range(n_classes):
        rows = labels == k
        nk = int(np.count_nonzero(rows))
        if nk < 2:
            warnings.append(f"class {k} has fewer than 2 rows")
            continue
        terms[k] = (nk / n) * gmd_sorted_columns(np.sort(X[rows], axis=0))
    within = ordered_sum_columns(terms)
    cov, corr, degenerate = _correlation(total, within)
    return GdcColumns(total, within, cov, corr, degenerate, tuple(warnings))


def _gdc_multivariate(X: np.ndarray, labels: np.ndarray, n_classes: int) -> GdcStat:
    n = X.shape[0]
    total = gmd_pairwise(X)
    terms = np.zeros((n_classes, 1))
    warnings = []
    for k in range(n_classes):
        Xk = X[labels == k]
        if Xk.shape[0] < 2:
            warnings.append(f"class {k} has fewer than 2 rows")
            continue
        terms[k, 0] = (Xk.shape[0] / n) * gmd_pairwise(Xk)
    within = float(ordered_sum_columns(terms)[0])
    cov, corr, degenerate = _correlation(total, within)
    return GdcStat(float(cov), float(corr), total, within, bool(degenerate), tuple(warnings))


def gdc_matrix(X: np.ndarray, labels: np.ndarray, n_classes: int) -> GdcStat:
    """GDC of the group formed by all columns of ``X``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] == 1:
        r = gdc_columns(X, labels, n_classes)
        return GdcStat(
            float(r.covariance[0]),
            float(r.correlation[0]),
            float(r.total[0]),
            float(r.within[0]),
            bool(r.degenerate[0]),
            r.warnings,
        )
    return _gdc_multivariate(np.ascontiguousarray(X), labels, n_classes)


def gdc(dataset: Dataset, columns) -> GdcStat:
    """Sample Gini distance covariance/correlation of a column group with the labels."""
    cols = [dataset.column_index(c) for c in columns]
    if not cols:
        raise DataError("column group is empty")
    if len(set(cols)) != len(cols):
        raise DataError("column group lists a column twice")
    return gdc_matrix(dataset.features[:, cols], dataset.labels, dataset.n_classes)


def encode_categories(values) -> tuple[np.ndarray, int]:
    """Map arbitrary category values (or rows of level tuples) to ``0..K-1``."""
    a = np.asarray(values)
    if a.ndim == 2:
        _, codes = np.unique(a, axis=0, return_inverse=True)
    else:
        _, codes = np.unique(a, return_inverse=True)
    codes = codes.ravel().astype(np.int64)
    return codes, int(codes.max()) + 1 if codes.size else 0


def gdc_swapped(numeric, categories) -> GdcStat:
    """GDC of a numeric response against a categorical predictor.

    Same statistic as :func:`gdc` with the categories playing the label role.
    """
    x = np.asarray(numeric, dtype=np.float64).ravel()
    codes, k = encode_categories(categories)
    if codes.shape[0] != x.shape[0]:
        raise DataError("numeric and categories must have the same length")
    if k < 2:
        raise DataError("only one class among the categories")
    return gdc(Dataset(x[:, None], codes), [0])


def gini_impurity(labels) -> float:
    """``1 - sum_k p_k^2``, the GMD of a categorical variable under the 0/1 metric."""
    codes, _ = encode_categories(labels)
    if codes.size == 0:
        raise ValueError("gini_impurity of an empty sample")
    p = np.bincount(codes) / codes.size
    return float(1.0 - np.sum(p * p))


def gdc_categorical(categorical_group, labels) -> float:
    """GDC between a categorical group and the labels, via Gini impurities.

    Each distinct level tuple of the group is one category;
    ``(GI(X) - sum_k p_k GI(X | Y = k)) / GI(X)`` with plug-in proportions.
    """
    xc, kx = encode_categories(categorical_group)
    yc, ky = encode_categories(labels)
    if xc.shape[0] != yc.shape[0]:
        raise DataError("group and labels must have the same length")
    if ky < 2:
        raise DataError("only one class in labels")
    gi = gini_impurity(xc)
    if kx < 2 or gi <= 0:
        raise DataError("degenerate categorical group: a single level")
    n = yc.size
    terms = np.zeros((ky, 1))
    for k in range(ky):
        rows = yc == k
        terms[k, 0] = (np.count_nonzero(rows) / n) * gini_impurity(xc[rows])
    cond = float(ordered_sum_columns(terms)[0])
    return (gi - cond) / gi
