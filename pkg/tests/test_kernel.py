import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kernel_jl.errors import DegenerateData, EmptyData, InvalidSpec, ShapeError, StateError
from kernel_jl.kernel import (KernelSpec, center_cross, center_gram, center_matrix, cross_gram, gram,
                              kernel_eval, nearest_rank, select_bandwidth)
from kernel_jl.linalg import SeededRng

point_sets = st.integers(1, 12).flatmap(
    lambda n: arrays(np.float64, (n, 2), elements=st.floats(-5, 5, allow_nan=False)))


def test_kernel_eval_closed_forms():
    spec = KernelSpec(1.0)
    assert kernel_eval(spec, [0.3, -1.0], [0.3, -1.0]) == 1.0
    assert kernel_eval(KernelSpec(2.0), [0.0, 0.0], [1.0, 1.0]) == pytest.approx(math.exp(-1), abs=1e-15)
    assert kernel_eval(spec, [0.0], [3.0]) == pytest.approx(1.234098e-4, rel=1e-6)
    with pytest.raises(ShapeError):
        kernel_eval(spec, [0.0], [0.0, 1.0])


def test_kernel_spec_validation():
    for bad in (0.0, -1.0, float("inf"), float("nan")):
        with pytest.raises(InvalidSpec):
            KernelSpec(bad)
    with pytest.raises(InvalidSpec):
        KernelSpec(1.0, family="laplace")
    assert KernelSpec.from_sigma(3.0).bandwidth_sq == 9.0
    assert KernelSpec(1.0).kappa == 1.0


def test_gram_examples():
    np.testing.assert_array_equal(gram(KernelSpec(1.0), [[2.0], [2.0]]).matrix, np.ones((2, 2)))
    e = math.exp(-1)
    np.testing.assert_allclose(gram(KernelSpec(1.0), [[0.0], [1.0]]).matrix, [[1, e], [e, 1]], atol=1e-15)
    with pytest.raises(EmptyData):
        gram(KernelSpec(1.0), np.empty((0, 2)))


@settings(max_examples=50, deadline=None)
@given(point_sets, st.floats(0.1, 10))
def test_gram_properties(pts, bw):
    spec = KernelSpec(bw)
    g = gram(spec, pts)
    k = g.matrix
    n = len(pts)
    assert np.array_equal(k, k.T)
    np.testing.assert_array_equal(np.diag(k), np.ones(n))
    assert np.all(k >= 0) and np.all(k <= 1)
    assert np.linalg.eigvalsh(k).min() >= -1e-8 * n
    np.testing.assert_array_equal(cross_gram(spec, pts, pts), k)
    perm = np.random.default_rng(n).permutation(n)
    np.testing.assert_array_equal(gram(spec, pts[perm]).matrix, k[np.ix_(perm, perm)])
    c = center_gram(g)
    assert np.linalg.eigvalsh(c.matrix).min() >= -1e-8 * n


def test_gram_strictly_positive_entries():
    k = gram(KernelSpec(1.0), [[0.0], [3.0]]).matrix
    assert np.all(k > 0)


def test_cross_gram_examples():
    spec = KernelSpec(1.0)
    np.testing.assert_allclose(cross_gram(spec, [[0.0], [2.0]], [[0.0]]), [[1.0], [math.exp(-4)]], atol=1e-16)
    assert cross_gram(spec, [[0.5]], [[1.5]])[0, 0] == pytest.approx(kernel_eval(spec, [0.5], [1.5]), abs=1e-16)
    with pytest.raises(ShapeError):
        cross_gram(spec, [[0.0, 1.0]], [[0.0]])
    with pytest.raises(EmptyData):
        cross_gram(spec, [[0.0]], np.empty((0, 1)))
    assert cross_gram(spec, np.empty((0, 1)), [[0.0]]).shape == (0, 1)


@settings(max_examples=30, deadline=None)
@given(point_sets, point_sets)
def test_cross_gram_transpose(a, b):
    spec = KernelSpec(1.7)
    np.testing.assert_array_equal(cross_gram(spec, a, b).T, cross_gram(spec, b, a))


def test_select_bandwidth_examples():
    # distances {1, 1, 2}: nearest-rank median is 1
    assert select_bandwidth([[0.0], [1.0], [2.0]], 50) == 1.0
    for p in (1, 25, 99):
        assert select_bandwidth([[0.0, 0.0], [3.0, 0.0]], p) == 3.0
    with pytest.raises(DegenerateData):
        select_bandwidth([[1.0], [1.0], [1.0]])
    with pytest.raises(EmptyData):
        select_bandwidth([[1.0]])
    with pytest.raises(InvalidSpec):
        select_bandwidth([[0.0], [1.0]], 100)


def test_nearest_rank_against_enumeration(rng):
    v = rng.random(37)
    s = np.sort(v)
    for p in (1, 10, 25, 50, 75, 99):
        # smallest value with at least p% of the sample at or below it
        expected = next(x for x in s if np.mean(s <= x) >= p / 100)
        assert nearest_rank(v, p) == expected


def test_bandwidth_pair_sampling(rng):
    pts = rng.standard_normal((300, 2))
    full = select_bandwidth(pts, 25)
    sampled = select_bandwidth(pts, 25, SeededRng(1), max_pairs=20_000)
    assert sampled == select_bandwidth(pts, 25, SeededRng(1), max_pairs=20_000)
    assert abs(sampled - full) / full < 0.05
    with pytest.raises(StateError):
        select_bandwidth(pts, 25, None, max_pairs=10)


def test_center_gram_examples():
    c = center_gram(gram(KernelSpec(1.0), [[1.0], [1.0]]))
    np.testing.assert_array_equal(c.matrix, np.zeros((2, 2)))
    with pytest.raises(StateError):
        center_gram(c)


@settings(max_examples=40, deadline=None)
@given(point_sets)
def test_centering_properties(pts):
    g = gram(KernelSpec(2.0), pts)
    c = center_gram(g)
    n = len(pts)
    h = np.eye(n) - np.ones((n, n)) / n
    np.testing.assert_allclose(c.matrix, h @ g.matrix @ h, atol=1e-12)
    assert np.abs(c.matrix.sum(axis=1)).max() <= 1e-10
    np.testing.assert_allclose(center_matrix(c.matrix), c.matrix, atol=1e-12)
    # a training point's centred column is its column of the centred Gram
    cols = center_cross(c, g.matrix)
    np.testing.assert_allclose(cols, c.matrix, atol=1e-12)


def test_center_cross_constant_column():
    # K = c 11^T and k_x = c 1 centre to zero
    n, cval = 4, 0.3
    from kernel_jl.kernel import GramMatrix
    from kernel_jl.linalg import SymMatrix
    g = center_gram(GramMatrix(SymMatrix(np.full((n, n), cval))))
    np.testing.assert_allclose(center_cross(g, np.full(n, cval)), np.zeros(n), atol=1e-16)


def test_center_cross_requires_state():
    g = gram(KernelSpec(1.0), [[0.0], [1.0]])
    with pytest.raises(StateError):
        center_cross(g, [1.0, 0.5])
    with pytest.raises(ShapeError):
        center_cross(center_gram(g), [1.0, 0.5, 0.2])


def test_kernel_apply_matches_dense(rng):
    from kernel_jl.kernel import kernel_apply
    spec = KernelSpec(0.8)
    rows, cols = rng.standard_normal((700, 3)), rng.standard_normal((9, 3))
    a, shift = rng.standard_normal((4, 9)), rng.standard_normal(4)
    dense = cross_gram(spec, rows, cols) @ a.T - shift
    np.testing.assert_allclose(kernel_apply(spec, rows, cols, a, shift), dense, rtol=1e-12, atol=1e-14)
    doubled = kernel_apply(spec, rows, cols, a, prep=lambda k: 2 * k)
    np.testing.assert_allclose(doubled, 2 * cross_gram(spec, rows, cols) @ a.T, rtol=1e-12, atol=1e-14)
    assert kernel_apply(spec, np.empty((0, 3)), cols, a).shape == (0, 4)
