import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ortho_group

from gdcscreen import kernels
from gdcscreen._pykernels import pair_distance_sum as py_pair_sum
from gdcscreen.core import Dataset
from gdcscreen.gmd import gmd_pairwise, gmd_univariate_fast, within_class_gmd
from tests.oracles import gmd_brute


def test_pairwise_examples(backend):
    assert gmd_pairwise([[0], [1]]) == 1.0
    assert gmd_pairwise([[5, 5], [5, 5], [5, 5]]) == 0.0
    assert gmd_pairwise([[1], [2], [4]]) == 2.0


def test_pairwise_errors():
    with pytest.raises(ValueError, match="insufficient points"):
        gmd_pairwise([[1.0]])
    with pytest.raises(ValueError):
        gmd_pairwise([[1.0, 2.0], [1.0]])
    with pytest.raises(ValueError):
        gmd_univariate_fast([3.0])


def test_fast_examples(backend):
    assert gmd_univariate_fast([0, 1]) == 1.0
    assert gmd_univariate_fast([1, 2, 4]) == gmd_pairwise([[1], [2], [4]]) == 2.0


def test_fast_matches_pairwise_1000_normals(backend):
    x = np.random.default_rng(1).standard_normal(1000)
    brute = gmd_brute(x)
    assert abs(gmd_univariate_fast(x) - brute) <= 1e-12 * brute
    assert abs(gmd_pairwise(x) - brute) <= 1e-12 * brute


def test_within_class_examples(backend):
    ds = Dataset([[1], [2], [3], [4]], [0, 0, 1, 1])
    r = within_class_gmd(ds, [0])
    np.testing.assert_array_equal(r.per_class, [1.0, 1.0])
    assert r.weighted_sum == 1.0
    assert r.warnings == ()
    same = Dataset(np.ones((4, 2)), [0, 0, 1, 1])
    assert within_class_gmd(same, [0, 1]).weighted_sum == 0.0
    lonely = Dataset([[1], [2], [3], [4]], [0, 0, 0, 1])
    r = within_class_gmd(lonely, [0])
    assert r.per_class[1] == 0.0
    assert len(r.warnings) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 400), st.integers(0, 2**32 - 1), st.sampled_from(["normal", "cauchy", "ties"]))
def test_fast_oracle_equivalence(m, seed, kind):
    rng = np.random.default_rng(seed)
    if kind == "normal":
        x = rng.standard_normal(m) * 10 ** rng.uniform(-3, 3)
    elif kind == "cauchy":
        x = rng.standard_cauchy(m)
    else:
        x = rng.integers(-3, 4, m).astype(float)
    ref = gmd_pairwise(x)
    assert abs(gmd_univariate_fast(x) - ref) <= 1e-12 * max(1.0, ref)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 200), st.integers(0, 2**32 - 1), st.sampled_from([1.0, -3.5, 1e3, 1e6, -1e6]))
def test_translation_invariance(m, seed, c):
    # dyadic grid values so x + c is exact in floating point
    x = np.random.default_rng(seed).integers(-2**20, 2**20, m) / 2**10
    for f in (gmd_univariate_fast, gmd_pairwise):
        a, b = f(x), f(x + c)
        assert abs(a - b) <= 1e-12 * max(a, 1e-300)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 200), st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-3))
def test_positive_homogeneity(m, seed, c):
    x = np.random.default_rng(seed).standard_normal(m)
    for f in (gmd_univariate_fast, gmd_pairwise):
        a, b = f(x), f(c * x)
        assert abs(b - abs(c) * a) <= 1e-12 * abs(c) * a


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 150), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_permutation_invariance(m, q, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, q))
    perm = rng.permutation(m)
    assert gmd_pairwise(X[perm]) == gmd_pairwise(X)
    assert gmd_univariate_fast(X[perm, 0]) == gmd_univariate_fast(X[:, 0])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 100), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_rotation_invariance(m, q, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, q))
    Q = ortho_group.rvs(q, random_state=seed)
    a, b = gmd_pairwise(X), gmd_pairwise(X @ Q.T)
    assert abs(a - b) <= 1e-10 * a


def test_value_zero_iff_identical(backend):
    assert gmd_univariate_fast([2.5] * 7) == 0.0
    assert gmd_univariate_fast([2.5] * 6 + [2.5 + 1e-12]) > 0.0


def test_compensated_sum_at_large_n():
    # 10^4 points: the compiled kernel must stay within the fast-path tolerance
    x = np.random.default_rng(3).standard_normal(10_000) + 100.0
    a = gmd_pairwise(x)
    b = gmd_univariate_fast(x)
    assert abs(a - b) <= 1e-12 * b
    assert abs(py_pair_sum(x[:, None]) / (10_000 * 9_999 / 2) - b) <= 1e-12 * b


def test_backends_agree():
    backends = kernels.available_backends()
    X = np.random.default_rng(4).standard_normal((300, 3))
    vals = [mod.pair_distance_sum(X) for mod in backends.values()]
    assert max(vals) - min(vals) <= 1e-13 * max(vals)
