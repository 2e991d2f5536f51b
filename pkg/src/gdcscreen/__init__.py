"""Gini distance correlation screening for ultrahigh-dimensional classification."""
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
    load_csv,
    load_groups,
    singleton_partition,
    write_csv,
    write_groups,
)
from .gdc import GdcStat, gdc, gdc_categorical, gdc_swapped, gini_impurity
from .gmd import gmd_pairwise, gmd_univariate_fast, within_class_gmd
from .kernels import BACKEND
from .screening import (
    MetricsSummary,
    RankedGroups,
    default_model_size,
    minimum_model_size,
    screen,
    summarize_replicates,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "DataError",
    "Dataset",
    "GdcStat",
    "GroupPartition",
    "Measure",
    "MetricsSummary",
    "RankedGroups",
    "ScreeningConfig",
    "ScreeningReport",
    "Threshold",
    "TopD",
    "default_model_size",
    "gdc",
    "gdc_categorical",
    "gdc_swapped",
    "gini_impurity",
    "gmd_pairwise",
    "gmd_univariate_fast",
    "load_csv",
    "load_groups",
    "minimum_model_size",
    "screen",
    "singleton_partition",
    "summarize_replicates",
    "within_class_gmd",
    "write_csv",
    "write_groups",
]
