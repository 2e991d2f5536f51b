"""Sure independence screening: per-group statistics, ranking and selection.

Ranking is by descending statistic with ties broken by ascending group
index, which makes the minimum model size well defined and every run
reproducible.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import baselines
from .core import (
    ConfigError,
    DataError,
    Dataset,
    GroupPartition,
    Measure,
    ScreeningConfig,
    ScreeningReport,
    Threshold,
    TopD,
)
from .gdc import encode_categories, gdc_categorical, gdc_columns, gdc_matrix

# Univariate columns are evaluated in blocks of this width regardless of the
# thread count, so the floating-point reduction layout never depends on it.
COLUMN_BLOCK = 128


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("GDC_SCREEN_THREADS", "").strip()
        threads = int(env) if env else (os.cpu_count() or 1)
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return threads


def _column_stats(measure: Measure, X, labels, n_classes):
    if measure is Measure.GDC:
        r = gdc_columns(X, labels, n_classes)
        return r.correlation, r.degenerate, r.warnings
    if measure is Measure.R2:
        r = baselines.r2_columns(X, labels, n_classes)
    elif measure is Measure.MV:
        r = baselines.mv_columns(X, labels, n_classes)
    elif measure is Measure.DT:
        r = baselines.dt_columns(X, labels)
    else:
        raise ConfigError(f"{measure} has no column-batch form")
    return r.values, r.degenerate, ()


def _group_stat(measure: Measure, X, labels, n_classes, dt=None):
    if measure is Measure.GDC:
        s = gdc_matrix(X, labels, n_classes)
        return s.correlation, s.degenerate, s.warnings
    if measure is Measure.DT:
        v, deg = dt(X)
        return v, deg, ()
    if measure is Measure.GDC_CATEGORICAL:
        try:
            return gdc_categorical(X, labels), False, ()
        except DataError:
            return 0.0, True, ()
    raise ConfigError(f"{measure.name} requires univariate groups")


def evaluate_groups(
    dataset: Dataset,
    partition: GroupPartition,
    measure: Measure,
    threads: int | None = None,
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Statistic of every group, written into pre-indexed slots."""
    measure = Measure(measure)
    partition.check_columns(dataset.p)
    X, y, K = dataset.features, dataset.labels, dataset.n_classes
    r = partition.r
    stats = np.zeros(r)
    degenerate = np.zeros(r, dtype=bool)
    warnings: list[str] = []

    batchable = measure in (Measure.GDC, Measure.R2, Measure.MV, Measure.DT)
    uni = [li for li, g in enumerate(partition.groups) if len(g) == 1 and batchable]
    multi = [li for li, g in enumerate(partition.groups) if not (len(g) == 1 and batchable)]
    dt = baselines.DistanceCorrelation(y) if measure is Measure.DT else None

    tasks: list[Callable[[], tuple]] = []
    for start in range(0, len(uni), COLUMN_BLOCK):
        slots = uni[start : start + COLUMN_BLOCK]
        cols = [partition.groups[li][0] for li in slots]

        def run(slots=slots, cols=cols):
            v, d, w = _column_stats(measure, np.ascontiguousarray(X[:, cols]), y, K)
            return slots, v, d, w

        tasks.append(run)
    for start in range(0, len(multi), 16):
        slots = multi[start : start + 16]

        def run(slots=slots):
            out = [
                _group_stat(measure, X[:, list(partition.groups[li])], y, K, dt)
                for li in slots
            ]
            return (
                slots,
                np.array([o[0] for o in out]),
                np.array([o[1] for o in out]),
                tuple(w for o in out for w in o[2]),
            )

        tasks.append(run)

    nthreads = min(resolve_threads(threads), max(len(tasks), 1))
    if nthreads == 1:
        results = [t() for t in tasks]
    else:
        with ThreadPoolExecutor(nthreads) as pool:
            results = list(pool.map(lambda t: t(), tasks))
    for slots, v, d, w in results:
        stats[slots] = v
        degenerate[slots] = d
        for msg in w:
            if msg not in warnings:
                warnings.append(msg)
    return stats, degenerate, tuple(warnings)


def rank_statistics(stats) -> np.ndarray:
    """Group indices by descending statistic, ties by ascending index."""
    stats = np.asarray(stats, dtype=np.float64)
    return np.lexsort((np.arange(stats.size), -stats))


def select(stats, ranking, rule: TopD | Threshold, n: int) -> tuple[int, ...]:
    if isinstance(rule, TopD):
        return tuple(int(i) for i in ranking[: min(rule.d, len(ranking))])
    cut = rule.cutoff(n)
    return tuple(int(i) for i in ranking if stats[i] >= cut)


def screen(
    dataset: Dataset,
    partition: GroupPartition,
    config: ScreeningConfig,
    threads: int | None = None,
) -> ScreeningReport:
    """Evaluate ``config.measure`` on every group, rank, and apply the selection rule."""
    config.validate(partition)
    stats, degenerate, warnings = evaluate_groups(dataset, partition, config.measure, threads)
    ranking = rank_statistics(stats)
    deg = tuple(int(i) for i in np.flatnonzero(degenerate))
    warnings = tuple(partition.warnings) + warnings
    if deg:
        warnings += (f"{len(deg)} degenerate group(s) scored 0",)
    stats.setflags(write=False)
    ranking.setflags(write=False)
    return ScreeningReport(
        stats=stats,
        ranking=ranking,
        selected=select(stats, ranking, config.rule, dataset.n),
        measure=config.measure,
        degenerate=deg,
        warnings=warnings,
    )


def screen_categorical_predictors(response, predictors, measure: Measure = Measure.GDC):
    """Score each categorical predictor column against a numeric response.

    The response plays the numeric role and each predictor column the label
    role. Predictors with a single level score 0 and are flagged.
    """
    measure = Measure(measure)
    yv = np.asarray(response, dtype=np.float64).ravel()
    Z = np.asarray(predictors)
    if measure is Measure.DT:
        r = baselines.dt_categorical_predictors(yv, Z)
        return r.values, r.degenerate
    stats = np.zeros(Z.shape[1])
    degenerate = np.zeros(Z.shape[1], dtype=bool)
    col = yv[:, None]
    for j in range(Z.shape[1]):
        codes, k = encode_categories(Z[:, j])
        if k < 2:
            degenerate[j] = True
            continue
        if measure is Measure.GDC:
            v, d, _ = _column_stats(measure, col, codes, k)
        elif measure is Measure.R2:
            v, d = baselines.r2_columns(col, codes, k)
        elif measure is Measure.MV:
            v, d = baselines.mv_columns(col, codes, k)
        else:
            raise ConfigError(f"{measure.name} is not defined for a numeric response")
        stats[j], degenerate[j] = v[0], d[0]
    return stats, degenerate


# ---------------------------------------------------------------- metrics


def default_model_size(n: int) -> int:
    """``floor(n / ln n)``."""
    if n < 3:
        raise ValueError(f"default model size needs n >= 3, got {n}")
    return int(math.floor(n / math.log(n)))


@dataclass(frozen=True)
class RankedGroups:
    entries: tuple[tuple[int, float], ...]
    produced_by: Measure

    @classmethod
    def from_stats(cls, stats, measure: Measure) -> "RankedGroups":
        stats = np.asarray(stats, dtype=np.float64)
        order = rank_statistics(stats)
        return cls(tuple((int(i), float(stats[i])) for i in order), Measure(measure))

    @classmethod
    def from_report(cls, report: ScreeningReport) -> "RankedGroups":
        return cls(
            tuple((int(i), float(report.stats[i])) for i in report.ranking), report.measure
        )

    @property
    def order(self) -> list[int]:
        return [g for g, _ in self.entries]

    def positions(self) -> dict[int, int]:
        """Group index -> 1-based rank."""
        return {g: pos for pos, (g, _) in enumerate(self.entries, start=1)}


def minimum_model_size(ranked: RankedGroups, active: Iterable[int]) -> int:
    """Smallest ranked prefix that contains every active group."""
    active = list(active)
    if not active:
        raise ValueError("active set is empty")
    pos = ranked.positions()
    missing = [a for a in active if a not in pos]
    if missing:
        raise ValueError(f"active groups {missing} are not in the ranking")
    return max(pos[a] for a in active)


@dataclass(frozen=True)
class MetricsSummary:
    mms_values: tuple[int, ...]
    mms_median: float
    rsd: float
    p_l: tuple[float, ...]
    p_all: float
    p_min: float
    p_max: float
    model_size_d: int
    active: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {
            "mms_median": self.mms_median,
            "rsd": self.rsd,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "p_all": self.p_all,
            "p_l": {str(a): v for a, v in zip(self.active, self.p_l)},
            "model_size_d": self.model_size_d,
            "replicates": len(self.mms_values),
        }


def robust_sd(values) -> float:
    """Interquartile range / 1.34, quartiles by linear interpolation."""
    q1, q3 = np.percentile(np.asarray(values, dtype=np.float64), [25, 75])
    return float((q3 - q1) / 1.34)


def summarize_replicates(
    per_replicate: Sequence[tuple[RankedGroups, Iterable[int]]], d: int
) -> MetricsSummary:
    """MMS median/RSD and top-``d`` inclusion proportions over replicates."""
    if not per_replicate:
        raise ValueError("no replicates to summarize")
    active = tuple(per_replicate[0][1])
    hits = np.zeros(len(active))
    all_hits = 0
    mms = []
    for ranked, act in per_replicate:
        if tuple(act) != active:
            raise ValueError("replicates disagree on the active set")
        pos = ranked.positions()
        mms.append(minimum_model_size(ranked, active))
        inside = np.array([pos[a] <= d for a in active])
        hits += inside
        all_hits += bool(inside.all())
    M = len(per_replicate)
    p_l = hits / M
    return MetricsSummary(
        mms_values=tuple(mms),
        mms_median=float(np.median(mms)),
        rsd=robust_sd(mms),
        p_l=tuple(float(v) for v in p_l),
        p_all=all_hits / M,
        p_min=float(p_l.min()),
        p_max=float(p_l.max()),
        model_size_d=int(d),
        active=active,
    )
