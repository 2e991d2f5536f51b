"""Gini mean difference estimators.

The Gini mean difference (GMD) of a sample is the average Euclidean
distance over all unordered pairs of points, the unbiased U-statistic for
``E||X1 - X2||``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .core import Dataset


def _n_pairs(m: int) -> float:
    return m * (m - 1) / 2.0


def gmd_pairwise(points) -> float:
    """GMD by direct enumeration of all pairs, O(m^2 q).

    Parameters
    ----------
    points : array_like, shape (m,) or (m, q)
        One point per row. A 1-D input is treated as ``q = 1``.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError("points must be a list of equal-length vectors")
    m = X.shape[0]
    if m < 2:
        raise ValueError(f"insufficient points: need m >= 2, got {m}")
    if X.shape[1] < 1:
        raise ValueError("points must have dimension q >= 1")
    if not np.all(np.isfinite(X)):
        raise ValueError("points must be finite")
    return kernels.pair_distance_sum(np.ascontiguousarray(X)) / _n_pairs(m)


def gmd_sorted_columns(S: np.ndarray) -> np.ndarray:
    """Column-wise GMD of a matrix whose columns are already sorted ascending."""
    m = S.shape[0]
    if m < 2:
        return np.zeros(S.shape[1])
    return kernels.sorted_gap_sums(np.asfortranarray(S, dtype=np.float64)) / _n_pairs(m)


def gmd_univariate_fast(values) -> float:
    """GMD of a 1-D sample in O(m log m).

    After sorting, the pair sum is ``sum_i i*(m-i)*(x_(i+1) - x_(i))``, an
    identity with the order-statistic form ``sum_i (2i-m-1) x_(i)`` whose
    terms are all nonnegative, so no cancellation occurs.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValueError(f"insufficient points: need m >= 2, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("values must be finite")
    return float(gmd_sorted_columns(np.sort(x)[:, None])[0])


def gmd(points) -> float:
    """GMD using the fast path for univariate input, pairwise otherwise."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1 or X.shape[1] == 1:
        return gmd_univariate_fast(X.ravel())
    return gmd_pairwise(X)


class WithinClassGmd(NamedTuple):
    per_class: np.ndarray
    weighted_sum: float
    warnings: tuple[str, ...]


def ordered_sum(terms) -> float:
    """Sum that does not depend on the order ``terms`` arrive in."""
    return float(ordered_sum_columns(np.asarray(terms, dtype=np.float64)[:, None])[0])


def ordered_sum_columns(T: np.ndarray) -> np.ndarray:
    """Column sums of ``T`` taken over the ascending-sorted entries, left to right."""
    T = np.sort(T, axis=0)
    acc = np.zeros(T.shape[1])
    for row in T:
        acc = acc + row
    return acc


def within_class_gmd(dataset: Dataset, columns) -> WithinClassGmd:
    """Per-class GMD of ``columns`` and its class-proportion weighted sum.

    Classes with fewer than two rows contribute zero and a warning.
    """
    cols = [dataset.column_index(c) for c in columns]
    X = dataset.features[:, cols]
    y = dataset.labels
    per_class = np.zeros(dataset.n_classes)
    warnings = []
    for k in range(dataset.n_classes):
        Xk = X[y == k]
        if Xk.shape[0] < 2:
            warnings.append(f"class {dataset.class_names[k]!r} has fewer than 2 rows")
            continue
        per_class[k] = gmd(Xk)
    weighted = ordered_sum(dataset.class_proportions * per_class)
    return WithinClassGmd(per_class, weighted, tuple(warnings))
