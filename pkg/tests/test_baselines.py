import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kernel_jl import baselines
from kernel_jl.clustering import kmeans, rand_index
from kernel_jl.errors import InvalidRank, RankDeficient, ShapeError
from kernel_jl.kernel import KernelSpec, center_cross, center_gram, cross_gram, gram
from kernel_jl.linalg import rank_d_pinv

SPEC = KernelSpec(1.0)


@pytest.fixture
def pts(rng):
    return rng.standard_normal((15, 2))


def test_identical_points_rank_deficient():
    with pytest.raises(RankDeficient) as info:
        baselines.kpca_fit([[1.0, 2.0], [1.0, 2.0]], SPEC, 1)
    assert info.value.achievable_rank == 0
    with pytest.raises(RankDeficient) as info:
        baselines.nystrom_fit([[1.0], [1.0]], SPEC, 2)
    assert info.value.achievable_rank == 1


def test_invalid_rank(pts):
    with pytest.raises(InvalidRank):
        baselines.kpca_fit(pts, SPEC, 0)
    with pytest.raises(InvalidRank):
        baselines.nystrom_fit(pts, SPEC, 16)
    with pytest.raises(ValueError):
        baselines.kpca_fit(pts, SPEC, 2, mode="textbook")


def test_kpca_paper_literal_map(pts):
    p = baselines.kpca_fit(pts, SPEC, 3)
    x = pts[0] + 0.3
    kx = cross_gram(SPEC, x[None, :], pts)[0]
    np.testing.assert_allclose(baselines.kpca_transform(p, x), p.eigenvectors.T @ kx, rtol=1e-12)
    # basis-vector weights applied to x_1 read off K(x_1, x_1) = 1
    e1 = np.zeros(15)
    e1[0] = 1.0
    assert e1 @ cross_gram(SPEC, pts[:1], pts)[0] == 1.0


def test_kpca_eigen_invariants(pts):
    p = baselines.kpca_fit(pts, SPEC, 5)
    assert np.all(np.diff(p.eigenvalues) <= 0)
    assert np.all(p.eigenvalues > 1e-10 * p.eigenvalues[0])
    np.testing.assert_allclose(p.gram.matrix @ p.eigenvectors, p.eigenvectors * p.eigenvalues, atol=1e-12)


def test_kpca_unit_norm_reconstruction(rng):
    pts = rng.standard_normal((8, 2)) * 2
    kbar = center_gram(gram(SPEC, pts)).matrix
    rank = int(np.sum(np.linalg.eigvalsh(kbar) > 1e-10 * np.linalg.eigvalsh(kbar).max()))
    assert rank == 7  # centring removes the ones direction
    p = baselines.kpca_fit(pts, SPEC, rank, mode="unit_norm")
    z = baselines.kpca_transform_batch(p, pts).points
    np.testing.assert_allclose(z @ z.T, kbar, atol=1e-6)


def test_kpca_unit_norm_variance(pts):
    p = baselines.kpca_fit(pts, SPEC, 4, mode="unit_norm")
    z = baselines.kpca_transform_batch(p, pts).points
    np.testing.assert_allclose(z.var(axis=0), p.eigenvalues / 15, atol=1e-8)


def test_kpca_unit_norm_uses_centred_columns(pts, rng):
    p = baselines.kpca_fit(pts, SPEC, 3, mode="unit_norm")
    x = rng.standard_normal(2)
    kc = center_cross(p.gram, cross_gram(SPEC, x[None, :], pts)[0])
    expected = (p.eigenvectors / np.sqrt(p.eigenvalues)).T @ kc
    np.testing.assert_allclose(baselines.kpca_transform(p, x), expected, rtol=1e-12)


def test_nystrom_landmark_reconstruction(rng):
    pts = rng.standard_normal((10, 2)) * 2
    k = gram(SPEC, pts).matrix
    p = baselines.nystrom_fit(pts, SPEC, 10)
    phi = baselines.nystrom_transform_batch(p, pts).points
    assert np.max(np.abs(phi @ phi.T - k)) <= 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_nystrom_matches_pinv_form(seed, d):
    r = np.random.default_rng(seed)
    pts = r.standard_normal((8, 2))
    p = baselines.nystrom_fit(pts, SPEC, d)
    xs = r.standard_normal((4, 2))
    phi = baselines.nystrom_transform_batch(p, xs).points
    kx = cross_gram(SPEC, xs, pts)
    pinv = rank_d_pinv(gram(SPEC, pts).base, d).entries
    np.testing.assert_allclose(phi @ phi.T, kx @ pinv @ kx.T, atol=1e-8)
    assert np.all(np.einsum("ij,ij->i", phi, phi) >= 0)


def test_nystrom_truncation_on_identity():
    # points so far apart the Gram is the identity to machine precision
    pts = np.array([[0.0], [100.0]])
    np.testing.assert_array_equal(gram(SPEC, pts).matrix, np.eye(2))
    p = baselines.nystrom_fit(pts, SPEC, 1)
    phi = baselines.nystrom_transform_batch(p, pts).points
    assert phi.shape == (2, 1)
    assert sorted(np.abs(phi[:, 0]).tolist()) == [0.0, 1.0]


@pytest.mark.parametrize("fit,tr,tb", [
    (lambda x: baselines.kpca_fit(x, SPEC, 3), baselines.kpca_transform, baselines.kpca_transform_batch),
    (lambda x: baselines.kpca_fit(x, SPEC, 3, "unit_norm"), baselines.kpca_transform,
     baselines.kpca_transform_batch),
    (lambda x: baselines.nystrom_fit(x, SPEC, 3), baselines.nystrom_transform,
     baselines.nystrom_transform_batch),
])
def test_batch_equals_loop_and_shapes(rng, pts, fit, tr, tb):
    p = fit(pts)
    xs = rng.standard_normal((300, 2))
    np.testing.assert_array_equal(tb(p, xs).points, np.array([tr(p, x) for x in xs]))
    assert tb(p, np.empty((0, 2))).points.shape == (0, 3)
    with pytest.raises(ShapeError):
        tr(p, [1.0, 2.0, 3.0])


def test_sign_flip_leaves_clustering_unchanged(rng):
    pts = np.vstack([rng.normal(0, 0.3, (30, 2)), rng.normal(3, 0.3, (30, 2))])
    p = baselines.kpca_fit(pts[::3], KernelSpec(2.0), 2)
    z = baselines.kpca_transform_batch(p, pts).points
    a = kmeans(z, 2, seed=1)
    b = kmeans(z * np.array([-1.0, 1.0]), 2, seed=1)
    assert rand_index(a.partition, b.partition) == 1.0
