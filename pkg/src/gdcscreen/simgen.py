"""Seeded generators for the four simulation designs and the experiment driver.

Replicate ``m`` of an experiment draws from its own PCG64 stream, derived
from ``SeedSequence(base_seed, spawn_key=(m,))``; results are therefore a
pure function of the SimulationSpec whatever order or thread the replicates run in.
"""
from __future__ import annotations

import configparser
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np
from scipy.signal import lfilter
from scipy.stats import norm

from .core import ConfigError, Dataset, Measure, contiguous_partition, singleton_partition
from .screening import (
    MetricsSummary,
    RankedGroups,
    default_model_size,
    evaluate_groups,
    resolve_threads,
    screen_categorical_predictors,
    summarize_replicates,
)

RNG_NAME = "numpy.random.PCG64 via SeedSequence(base_seed, spawn_key=(replicate,))"

Q1 = float(norm.ppf(0.25))
Q3 = float(norm.ppf(0.75))
AR_RHO = 0.5


class Design(str, enum.Enum):
    LDA = "lda"
    LOGISTIC = "logistic"
    GWAS = "gwas"
    GROUPED = "grouped"


class ErrorDist(str, enum.Enum):
    NORMAL = "normal"
    T1 = "t1"
    T2 = "t2"

    @property
    def df(self) -> int | None:
        return {"normal": None, "t1": 1, "t2": 2}[self.value]


NAMED_PROBS = {
    3: {
        "balanced": (1 / 3, 1 / 3, 1 / 3),
        "slight": (3 / 12, 4 / 12, 5 / 12),
        "heavy": (0.1, 0.3, 0.6),
    },
    10: {
        "balanced": (0.1,) * 10,
        "slight": tuple(v / 100 for v in (6, 7, 8, 9, 10, 10, 11, 12, 13, 14)),
        "heavy": tuple(v / 100 for v in (2, 4, 6, 8, 10, 10, 12, 14, 16, 18)),
    },
}


def resolve_probs(K: int, probs: str | Sequence[float]) -> tuple[float, ...]:
    """Class probabilities from a name (balanced/slight/heavy) or explicit values."""
    if isinstance(probs, str):
        key = probs.strip().lower()
        if key == "balanced":
            return (1.0 / K,) * K
        if key in ("slight", "heavy") and K in NAMED_PROBS:
            return NAMED_PROBS[K][key]
        try:
            probs = [float(v) for v in key.split(",")]
        except ValueError:
            raise ConfigError(f"unknown class probabilities {probs!r} for K={K}") from None
    probs = tuple(float(v) for v in probs)
    if len(probs) != K:
        raise ConfigError(f"need {K} class probabilities, got {len(probs)}")
    if any(v <= 0 for v in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-9):
        raise ConfigError("class probabilities must be positive and sum to 1")
    return probs


def replicate_rng(base_seed: int, replicate: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(replicate),))
    return np.random.Generator(np.random.PCG64(ss))


def _errors(rng: np.random.Generator, shape, error: ErrorDist) -> np.ndarray:
    z = rng.standard_normal(shape)
    nu = ErrorDist(error).df
    if nu is None:
        return z
    return z / np.sqrt(rng.chisquare(nu, shape) / nu)


def ar1_normal(rng: np.random.Generator, n: int, p: int, rho: float = AR_RHO) -> np.ndarray:
    """Rows ~ N(0, Sigma) with ``Sigma_ij = rho^|i-j|`` via the AR(1) recursion."""
    z = rng.standard_normal((n, p))
    s = math.sqrt(1.0 - rho * rho)
    z[:, 0] /= s  # first coordinate is z itself, not s*z
    return lfilter([s], [1.0, -rho], z, axis=1)


def _draw_labels(rng, n, probs) -> np.ndarray:
    return rng.choice(len(probs), size=n, p=np.asarray(probs))


def _compact(y: np.ndarray, K: int) -> tuple[np.ndarray, tuple[str, ...]]:
    """Drop empty classes, keeping class identity in the names."""
    present = np.flatnonzero(np.bincount(y, minlength=K))
    remap = np.full(K, -1)
    remap[present] = np.arange(present.size)
    return remap[y], tuple(str(k) for k in present)


def gen_lda(K, n, class_probs, error, p, seed_or_rng):
    """Multiclass location model: class ``k`` shifts coordinate ``k`` by 3.

    Returns ``(dataset, active)`` with the first ``K`` features active.
    """
    rng = _as_rng(seed_or_rng)
    probs = resolve_probs(K, class_probs)
    if K < 2 or p < K or n < 2:
        raise ConfigError("gen_lda needs K >= 2, p >= K, n >= 2")
    y = _draw_labels(rng, n, probs)
    X = _errors(rng, (n, p), ErrorDist(error))
    X[np.arange(n), y] += 3.0
    codes, names = _compact(y, K)
    return Dataset(X, codes, class_names=names), tuple(range(K))


def logistic_log_odds(X: np.ndarray) -> np.ndarray:
    return (
        -3.0
        + 2.0 * X[:, 0]
        + 2.0 * X[:, 1]
        + 2.0 * X[:, 2]
        + 3.0 * np.sin(X[:, 3])
        + 4.0 * X[:, 4] ** 2
    )


def gen_logistic(n, p, cov, seed_or_rng):
    """Binary logistic model on five active features; ``cov`` is 'identity' or 'ar1'."""
    rng = _as_rng(seed_or_rng)
    if p < 5 or n < 2:
        raise ConfigError("gen_logistic needs p >= 5, n >= 2")
    cov = str(cov).lower()
    if cov == "identity":
        X = rng.standard_normal((n, p))
    elif cov == "ar1":
        X = ar1_normal(rng, n, p)
    else:
        raise ConfigError(f"unknown covariance {cov!r}; use identity or ar1")
    prob = 1.0 / (1.0 + np.exp(-logistic_log_odds(X)))
    y = (rng.random(n) < prob).astype(np.int64)
    if np.unique(y).size < 2:
        raise ConfigError("logistic draw produced a single class; use another seed")
    return Dataset(X, y, class_names=("-1", "1")), (0, 1, 2, 3, 4)


GWAS_ACTIVE = (0, 1, 9, 19, 99)


def snp_categories(X: np.ndarray) -> np.ndarray:
    """1 below the first quartile, -1 at or above the third, else 0."""
    Z = np.zeros(X.shape, dtype=np.int8)
    Z[X < Q1] = 1
    Z[X >= Q3] = -1
    return Z


def gen_gwas(n, p, error, seed_or_rng):
    """SNP design: returns ``(response, snp_matrix, active)``.

    Coefficients ``beta_j = (-1)^U (2 ln n / sqrt n + |N(0,1)|)`` share one
    sign draw ``U ~ Bernoulli(0.4)``; all of them are fresh on every call.
    """
    rng = _as_rng(seed_or_rng)
    if p < 100 or n < 2:
        raise ConfigError("gen_gwas needs p >= 100, n >= 2")
    Z = snp_categories(ar1_normal(rng, n, p))
    sign = -1.0 if rng.random() < 0.4 else 1.0
    beta = sign * (2.0 * math.log(n) / math.sqrt(n) + np.abs(rng.standard_normal(5)))
    eps = _errors(rng, n, ErrorDist(error))
    Zf = Z.astype(np.float64)
    y = (
        beta[0] * Zf[:, 0]
        + beta[1] * Zf[:, 1]
        + 2.0 * beta[2] * Zf[:, 9]
        + 2.0 * beta[3] * Zf[:, 19]
        - 2.0 * beta[4] * np.abs(Zf[:, 99])
        + eps
    )
    return y, Z, GWAS_ACTIVE


def grouped_means(case: str, k: int) -> np.ndarray:
    """Mean of the first six coordinates given class ``k`` (0-based)."""
    e = np.zeros(3)
    e[k] = 1.0
    case = str(case).lower()
    if case == "a":
        return np.concatenate([1.5 * e, 1.5 * e])
    if case == "b":
        return np.concatenate([2.0 * e, e])
    raise ConfigError(f"unknown grouped case {case!r}; use a or b")


def gen_grouped(case, class_probs, error, n, r, seed_or_rng):
    """Three-class location model over ``r`` groups of 3; groups 0 and 1 active."""
    rng = _as_rng(seed_or_rng)
    if r < 2 or n < 2:
        raise ConfigError("gen_grouped needs r >= 2, n >= 2")
    probs = resolve_probs(3, class_probs)
    means = np.stack([grouped_means(case, k) for k in range(3)])
    y = _draw_labels(rng, n, probs)
    X = _errors(rng, (n, 3 * r), ErrorDist(error))
    X[:, :6] += means[y]
    codes, names = _compact(y, 3)
    return Dataset(X, codes, class_names=names), contiguous_partition(3 * r, 3), (0, 1)


def _as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed_or_rng))))


# ------------------------------------------------------------- experiments


@dataclass(frozen=True)
class SimulationSpec:
    design: Design
    n: int
    p: int = 2000
    replicates: int = 100
    base_seed: int = 0
    measures: tuple[Measure, ...] = (Measure.GDC,)
    K: int = 3
    probs: str = "balanced"
    error: ErrorDist = ErrorDist.NORMAL
    cov: str = "ar1"
    case: str = "a"
    r: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "design", Design(self.design))
        object.__setattr__(self, "error", ErrorDist(self.error))
        object.__setattr__(self, "measures", tuple(Measure(m) for m in self.measures))
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.n < 3:
            raise ConfigError("n must be >= 3")
        if self.design is Design.LDA:
            resolve_probs(self.K, self.probs)
        if self.design is Design.GROUPED:
            resolve_probs(3, self.probs)
            grouped_means(self.case, 0)
        if self.design is Design.GWAS and self.error is ErrorDist.T2:
            raise ConfigError("gwas error must be normal or t1")
        if self.design is not Design.GWAS and self.error is ErrorDist.T1:
            raise ConfigError(f"{self.design.value} error must be normal or t2")
        if self.design is Design.GROUPED:
            bad = [m for m in self.measures if m in (Measure.MV, Measure.R2)]
            if bad:
                raise ConfigError(f"{bad[0].name} requires univariate groups")

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, enum.Enum):
                v = v.value
            elif isinstance(v, tuple):
                v = [m.value for m in v]
            out[f.name] = v
        return out


def spec_from_mapping(values: dict) -> SimulationSpec:
    """Build a spec from string key/value pairs (config file or CLI flags)."""
    kw: dict = {}
    names = {f.name for f in fields(SimulationSpec)}
    aliases = {"reps": "replicates", "seed": "base_seed", "k": "K"}
    for key, raw in values.items():
        key = key.strip()
        key = aliases.get(key, key)
        if key not in names:
            raise ConfigError(f"unknown simulation key {key!r}")
        if raw is None:
            continue
        if key in ("n", "p", "replicates", "base_seed", "K", "r"):
            try:
                kw[key] = int(raw)
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
        elif key == "measures":
            if isinstance(raw, str):
                raw = [m.strip() for m in raw.split(",") if m.strip()]
            try:
                kw[key] = tuple(Measure(m) for m in raw)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        else:
            kw[key] = raw
    if "design" not in kw:
        raise ConfigError("simulation spec needs a design")
    try:
        return SimulationSpec(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_spec(path) -> SimulationSpec:
    """Read ``key = value`` lines (an optional ``[simulation]`` header is allowed)."""
    text = open(path, encoding="utf-8").read()
    parser = configparser.ConfigParser()
    parser.optionxform = str
    if not any(line.strip().startswith("[") for line in text.splitlines()):
        text = "[simulation]\n" + text
    parser.read_string(text)
    section = parser["simulation"] if parser.has_section("simulation") else parser[parser.sections()[0]]
    return spec_from_mapping(dict(section))


@dataclass(frozen=True)
class ReplicateResult:
    replicate: int
    ranked: dict
    active: tuple[int, ...]


def run_replicate(spec: SimulationSpec, m: int) -> ReplicateResult:
    rng = replicate_rng(spec.base_seed, m)
    ranked = {}
    if spec.design is Design.GWAS:
        y, Z, active = gen_gwas(spec.n, spec.p, spec.error, rng)
        for meas in spec.measures:
            stats, _ = screen_categorical_predictors(y, Z, meas)
            ranked[meas] = RankedGroups.from_stats(stats, meas)
        return ReplicateResult(m, ranked, active)
    if spec.design is Design.LDA:
        ds, active = gen_lda(spec.K, spec.n, spec.probs, spec.error, spec.p, rng)
        partition = singleton_partition(ds.p)
    elif spec.design is Design.LOGISTIC:
        ds, active = gen_logistic(spec.n, spec.p, spec.cov, rng)
        partition = singleton_partition(ds.p)
    else:
        ds, partition, active = gen_grouped(spec.case, spec.probs, spec.error, spec.n, spec.r, rng)
    for meas in spec.measures:
        stats, _, _ = evaluate_groups(ds, partition, meas, threads=1)
        ranked[meas] = RankedGroups.from_stats(stats, meas)
    return ReplicateResult(m, ranked, active)


def run_experiment(
    spec: SimulationSpec, threads: int | None = None, progress=None
) -> dict[Measure, MetricsSummary]:
    """Run every replicate and summarize each measure with ``d = floor(n / ln n)``."""
    nthreads = min(resolve_threads(threads), spec.replicates)
    results: list[ReplicateResult | None] = [None] * spec.replicates

    def work(m):
        results[m] = run_replicate(spec, m)
        if progress is not None:
            progress(m)

    if nthreads == 1:
        for m in range(spec.replicates):
            work(m)
    else:
        with ThreadPoolExecutor(nthreads) as pool:
            list(pool.map(work, range(spec.replicates)))
    d = default_model_size(spec.n)
    return {
        meas: summarize_replicates([(res.ranked[meas], res.active) for res in results], d)
        for meas in spec.measures
    }
