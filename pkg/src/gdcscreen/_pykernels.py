"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures and contracts. Summation goes through :func:`math.fsum`
(correctly rounded) where the compiled side uses Neumaier compensation, so
the two backends agree to a few ulps but are not bit-identical.
"""
import math

import numpy as np

BACKEND = "python"

# rows of the condensed distance list materialized at once
_BLOCK = 1 << 20


def pair_distance_sum(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    partials = []
    chunk = []
    size = 0
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        if X.shape[1] == 1:
            d = np.abs(diff[:, 0])
        else:
            d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        chunk.append(d)
        size += d.size
        if size >= _BLOCK:
            partials.append(math.fsum(np.concatenate(chunk)))
            chunk, size = [], 0
    if chunk:
        partials.append(math.fsum(np.concatenate(chunk)))
    return math.fsum(partials)


def sorted_gap_sums(S):
    S = np.asarray(S, dtype=np.float64)
    m = S.shape[0]
    if m < 2:
        return np.zeros(S.shape[1])
    i = np.arange(1, m, dtype=np.float64)
    w = i * (m - i)
    terms = np.diff(S, axis=0) * w[:, None]
    return np.array([math.fsum(terms[:, c]) for c in range(S.shape[1])])


def centered_distance_moments(X, B):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[1] == 1:
        dist = np.abs(X[:, 0][:, None] - X[:, 0][None, :])
    else:
        diff = X[:, None, :] - X[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    rmean = dist.mean(axis=1)
    A = dist - rmean[:, None] - rmean[None, :] + dist.mean()
    return math.fsum((A * B).ravel()), math.fsum((A * A).ravel())
