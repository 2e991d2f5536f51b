"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Setting ``GDC_SCREEN_PURE_PYTHON=1`` forces the
fallback (useful for benchmarking and for checking the two agree).
"""
import os

from . import _pykernels

if os.environ.get("GDC_SCREEN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND

pair_distance_sum = _impl.pair_distance_sum
sorted_gap_sums = _impl.sorted_gap_sums
centered_distance_moments = _impl.centered_distance_moments


def available_backends():
    """Return ``{name: module}`` for every importable kernel backend."""
    out = {"python": _pykernels}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels
    return out
