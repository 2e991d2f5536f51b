"""Data model and file ingestion shared by the screening modules."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Invalid input data (bad file contents, violated dataset invariants)."""


class ConfigError(ValueError):
    """A screening configuration that cannot be applied to the given input."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Numeric feature matrix (n x p) with a categorical label per row.

    ``labels`` holds class indices in ``0..K-1`` and every class must be
    present. Use :meth:`from_raw_labels` to encode arbitrary label values.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DataError(
                f"labels must be a vector of length {X.shape[0]}, got shape {y.shape}"
            )
        if y.size and not np.issubdtype(y.dtype, np.integer):
            if not np.all(np.equal(np.mod(y, 1), 0)):
                raise DataError("labels must be integer class indices")
        y = y.astype(np.int64)
        n, p = X.shape
        if n < 2:
            raise DataError(f"need at least 2 rows, got {n}")
        if p < 1:
            raise DataError("need at least 1 feature column")
        if not np.all(np.isfinite(X)):
            i, j = np.argwhere(~np.isfinite(X))[0]
            raise DataError(f"non-finite feature value at row {i}, column {j}")
        if y.min() < 0:
            raise DataError("labels must be nonnegative class indices")
        counts = np.bincount(y)
        if counts.size < 2:
            raise DataError("only one class present; need K >= 2")
        if np.any(counts == 0):
            missing = np.flatnonzero(counts == 0).tolist()
            raise DataError(f"class indices {missing} have no rows")
        names = tuple(str(c) for c in self.column_names) or tuple(
            f"X{j + 1}" for j in range(p)
        )
        if len(names) != p:
            raise DataError(f"expected {p} column names, got {len(names)}")
        classes = tuple(str(c) for c in self.class_names) or tuple(
            str(k) for k in range(counts.size)
        )
        if len(classes) != counts.size:
            raise DataError(f"expected {counts.size} class names, got {len(classes)}")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "class_names", classes)
        object.__setattr__(self, "_counts", _frozen(counts))

    @classmethod
    def from_raw_labels(cls, features, raw_labels, column_names=()) -> "Dataset":
        """Encode arbitrary label values as classes in first-appearance order."""
        mapping: dict = {}
        codes = []
        for v in raw_labels:
            codes.append(mapping.setdefault(v, len(mapping)))
        return cls(
            features,
            np.asarray(codes, dtype=np.int64),
            column_names=column_names,
            class_names=tuple(str(k) for k in mapping),
        )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return self._counts.size

    @property
    def class_counts(self) -> np.ndarray:
        return self._counts

    @property
    def class_proportions(self) -> np.ndarray:
        return self._counts / self.n

    def column_index(self, ref: str | int) -> int:
        """Resolve a column by header name, falling back to a zero-based index."""
        if isinstance(ref, str):
            ref = ref.strip()
            if ref in self.column_names:
                return self.column_names.index(ref)
            try:
                ref = int(ref)
            except ValueError:
                raise DataError(f"unknown column {ref!r}") from None
        if not 0 <= ref < self.p:
            raise DataError(f"column index {ref} out of range [0, {self.p})")
        return int(ref)


@dataclass(frozen=True)
class GroupPartition:
    """Ordered, pairwise-disjoint groups of feature columns."""

    groups: tuple[tuple[int, ...], ...]
    group_labels: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        groups = tuple(tuple(int(c) for c in g) for g in self.groups)
        if not groups:
            raise DataError("partition needs at least one group")
        seen: set[int] = set()
        for li, g in enumerate(groups):
            if not g:
                raise DataError(f"group {li} is empty")
            for c in g:
                if c < 0:
                    raise DataError(f"negative column index {c} in group {li}")
                if c in seen:
                    raise DataError(f"duplicate column {c} (group {li})")
                seen.add(c)
        labels = tuple(self.group_labels) or tuple(f"g{li + 1}" for li in range(len(groups)))
        if len(labels) != len(groups):
            raise DataError("group_labels length does not match number of groups")
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "group_labels", labels)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def r(self) -> int:
        return len(self.groups)

    @property
    def sizes(self) -> list[int]:
        return [len(g) for g in self.groups]

    @property
    def all_univariate(self) -> bool:
        return all(len(g) == 1 for g in self.groups)

    def check_columns(self, p: int) -> None:
        for li, g in enumerate(self.groups):
            bad = [c for c in g if c >= p]
            if bad:
                raise DataError(f"group {li} references column {bad[0]} but p = {p}")


def singleton_partition(p: int, column_names: Sequence[str] = ()) -> GroupPartition:
    """One group per column, group ``l`` = ``{l}``."""
    if p < 1:
        raise DataError("singleton partition needs p >= 1")
    return GroupPartition(
        tuple((j,) for j in range(p)), group_labels=tuple(column_names)
    )


def contiguous_partition(p: int, size: int) -> GroupPartition:
    """Consecutive groups of ``size`` columns: ``{0..size-1}, {size..2*size-1}, ...``."""
    if p < 1 or size < 1 or p % size:
        raise DataError(f"cannot split {p} columns into groups of {size}")
    return GroupPartition(tuple(tuple(range(s, s + size)) for s in range(0, p, size)))


class Measure(str, enum.Enum):
    GDC = "gdc"
    DT = "dt"
    MV = "mv"
    R2 = "r2"
    GDC_CATEGORICAL = "gdc_categorical"


@dataclass(frozen=True)
class TopD:
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConfigError(f"top-d needs a positive integer, got {self.d}")


@dataclass(frozen=True)
class Threshold:
    c: float
    kappa: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ConfigError(f"threshold c must be positive, got {self.c}")
        if not 0 <= self.kappa < 0.5:
            raise ConfigError(f"kappa must lie in [0, 0.5), got {self.kappa}")

    def cutoff(self, n: int) -> float:
        return self.c * n ** (-self.kappa)


@dataclass(frozen=True)
class ScreeningConfig:
    measure: Measure = Measure.GDC
    rule: TopD | Threshold = field(default_factory=lambda: TopD(1))

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))

    def validate(self, partition: GroupPartition) -> None:
        if self.measure in (Measure.MV, Measure.R2) and not partition.all_univariate:
            raise ConfigError(f"{self.measure.name} requires univariate groups")
        if isinstance(self.rule, TopD) and self.rule.d > partition.r:
            raise ConfigError(f"top-d {self.rule.d} exceeds number of groups {partition.r}")


@dataclass(frozen=True)
class ScreeningReport:
    """Per-group statistics, their deterministic ranking and the selected set."""

    stats: np.ndarray
    ranking: np.ndarray
    selected: tuple[int, ...]
    measure: Measure
    degenerate: tuple[int, ...] = ()
    warnings: tuple[str, ...] = ()

    def position(self, group: int) -> int:
        """1-based rank of ``group``."""
        return int(np.flatnonzero(self.ranking == group)[0]) + 1


# ---------------------------------------------------------------- file I/O


def _label_index(header: list[str], label_column: str | int) -> int:
    if isinstance(label_column, str):
        if label_column in header:
            return header.index(label_column)
        try:
            label_column = int(label_column)
        except ValueError:
            raise DataError(f"label column {label_column!r} not found in header") from None
    if not 0 <= label_column < len(header):
        raise DataError(f"label column index {label_column} out of range")
    return label_column


def load_csv(path, label_column: str | int) -> Dataset:
    """Read a comma-separated file with a header row into a :class:`Dataset`.

    Labels are mapped to classes in order of first appearance; every other
    column must parse as a finite real number.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        li = _label_index(header, label_column)
        feature_cols = [j for j in range(len(header)) if j != li]
        rows, labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(
                    f"{path}: line {lineno} has {len(rec)} fields, header has {len(header)}"
                )
            vals = []
            for j in feature_cols:
                cell = rec[j].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: cannot parse {cell!r} at line {lineno}, column {header[j]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(
                        f"{path}: non-finite value {cell!r} at line {lineno}, column {header[j]!r}"
                    )
                vals.append(v)
            rows.append(vals)
            labels.append(rec[li].strip())
    if len(rows) < 2:
        raise DataError(f"{path}: need at least 2 data rows, got {len(rows)}")
    if len(set(labels)) < 2:
        raise DataError(f"{path}: only one class in label column")
    if not feature_cols:
        raise DataError(f"{path}: no feature columns")
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(feature_cols))
    return Dataset.from_raw_labels(X, labels, column_names=[header[j] for j in feature_cols])


def write_csv(dataset: Dataset, path, label_name: str = "label") -> None:
    """Write ``dataset`` with the label as the last column (17 significant digits)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(dataset.column_names) + [label_name])
        for row, y in zip(dataset.features, dataset.labels):
            w.writerow([format(v, ".17g") for v in row] + [dataset.class_names[y]])


def load_groups(path, dataset: Dataset) -> GroupPartition:
    """Parse ``name: col,col,...`` lines into a :class:`GroupPartition`.

    Blank lines and lines starting with ``#`` are skipped. Columns are given
    by header name or zero-based index. Columns left out of every group are
    excluded from screening and reported in ``warnings``.
    """
    groups, names = [], []
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    owner: dict[int, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rest = line.partition(":")
        name = name.strip()
        if not sep or not name:
            raise DataError(f"{path}: line {lineno}: expected 'name: col,col,...'")
        refs = [c for c in (s.strip() for s in rest.split(",")) if c]
        if not refs:
            raise DataError(f"{path}: line {lineno}: empty group {name!r}")
        cols = []
        for ref in refs:
            j = dataset.column_index(ref)
            if j in owner:
                raise DataError(
                    f"{path}: line {lineno}: duplicate column {ref!r} "
                    f"(already in group {owner[j]!r})"
                )
            owner[j] = name
            cols.append(j)
        groups.append(tuple(cols))
        names.append(name)
    if not groups:
        raise DataError(f"{path}: no groups defined")
    uncovered = [dataset.column_names[j] for j in range(dataset.p) if j not in owner]
    warnings = ()
    if uncovered:
        warnings = (f"columns not in any group are excluded: {', '.join(uncovered)}",)
    return GroupPartition(tuple(groups), tuple(names), warnings)


def write_groups(partition: GroupPartition, path, column_names: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for name, g in zip(partition.group_labels, partition.groups):
            cols = [column_names[c] if column_names else str(c) for c in g]
            fh.write(f"{name}: {','.join(cols)}\n")
