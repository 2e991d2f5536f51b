# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the pairwise-distance sums.

Every routine accumulates with Neumaier compensated summation in a fixed
index order, so results do not depend on how callers batch or thread them.
Build without ``-ffast-math``; reassociation would silently undo the
compensation.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "compiled"


cdef inline void _acc(double x, double* s, double* c) noexcept nogil:
    cdef double t = s[0] + x
    if fabs(s[0]) >= fabs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


def pair_distance_sum(const double[:, ::1] X):
    """Sum of Euclidean distances over all pairs i < j (i-major order)."""
    cdef Py_ssize_t n = X.shape[0], q = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double s = 0.0, c = 0.0, d, acc
    with nogil:
        if q == 1:
            for i in range(n):
                for j in range(i + 1, n):
                    _acc(fabs(X[i, 0] - X[j, 0]), &s, &c)
        else:
            for i in range(n):
                for j in range(i + 1, n):
                    acc = 0.0
                    for k in range(q):
                        d = X[i, k] - X[j, k]
                        acc += d * d
                    _acc(sqrt(acc), &s, &c)
    return s + c


def sorted_gap_sums(const double[::1, :] S):
    """Per-column sum of ``i * (m - i) * (x_(i+1) - x_(i))`` for column-sorted ``S``.

    Equals the sum of ``|x_i - x_j|`` over pairs in each column.
    """
    cdef Py_ssize_t m = S.shape[0], p = S.shape[1]
    cdef Py_ssize_t i, col
    cdef double s, c, w
    out = np.zeros(p, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for col in range(p):
            s = 0.0
            c = 0.0
            for i in range(m - 1):
                w = <double>(i + 1) * <double>(m - i - 1)
                _acc(w * (S[i + 1, col] - S[i, col]), &s, &c)
            res[col] = s + c
    return out


def centered_distance_moments(const double[:, ::1] X, const double[:, ::1] B):
    """Return ``(sum(A*B), sum(A*A))`` with ``A`` the double-centered distance matrix of ``X``.

    ``B`` must already be double-centered.
    """
    cdef Py_ssize_t n = X.shape[0], q = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double d, acc, grand, a
    cdef double sab = 0.0, cab = 0.0, saa = 0.0, caa = 0.0
    cdef double* dist = <double*> malloc(n * n * sizeof(double))
    cdef double* rmean = <double*> malloc(n * sizeof(double))
    if dist == NULL or rmean == NULL:
        free(dist)
        free(rmean)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                dist[i * n + i] = 0.0
                for j in range(i + 1, n):
                    acc = 0.0
                    for k in range(q):
                        d = X[i, k] - X[j, k]
                        acc += d * d
                    acc = sqrt(acc)
                    dist[i * n + j] = acc
                    dist[j * n + i] = acc
            grand = 0.0
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += dist[i * n + j]
                rmean[i] = acc / n
                grand += acc
            grand /= <double>(n) * <double>(n)
            for i in range(n):
                for j in range(n):
                    a = dist[i * n + j] - rmean[i] - rmean[j] + grand
                    _acc(a * B[i, j], &sab, &cab)
                    _acc(a * a, &saa, &caa)
    finally:
        free(dist)
        free(rmean)
    return sab + cab, saa + caa
