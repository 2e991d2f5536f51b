"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Prints one line per (kernel, size) with the best-of-``repeat`` wall time
of each backend and the speedup of the compiled one.
"""
import argparse
import timeit

import numpy as np

from gdcscreen import _pykernels
from gdcscreen.baselines import centered_label_distances

try:
    from gdcscreen import _kernels
except ImportError:
    _kernels = None


def cases(quick):
    rng = np.random.default_rng(0)
    sizes = (200, 1000) if quick else (200, 1000, 3000)
    for n in sizes:
        x1 = np.ascontiguousarray(rng.standard_normal((n, 1)))
        yield "pair_distance_sum q=1", n, (x1,)
        x3 = np.ascontiguousarray(rng.standard_normal((n, 3)))
        yield "pair_distance_sum q=3", n, (x3,)
        S = np.asfortranarray(np.sort(rng.standard_normal((n, 128)), axis=0))
        yield "sorted_gap_sums p=128", n, (S,)
        if n <= 1000:
            Bc = centered_label_distances(rng.integers(0, 3, n))
            yield "centered_distance_moments q=3", n, (x3, Bc)


def best(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 1 << 12:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="skip the largest size")
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':32s} {'n':>6s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for name, n, fargs in cases(args.quick):
        fn = name.split()[0]
        t_py = best(getattr(_pykernels, fn), fargs, args.repeat)
        if _kernels is None:
            print(f"{name:32s} {n:6d} {t_py * 1e3:12.3f}")
            continue
        t_c = best(getattr(_kernels, fn), fargs, args.repeat)
        a, b = getattr(_pykernels, fn)(*fargs), getattr(_kernels, fn)(*fargs)
        assert np.allclose(a, b, rtol=1e-12, atol=0), name
        print(f"{name:32s} {n:6d} {t_py * 1e3:12.3f} {t_c * 1e3:14.3f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
