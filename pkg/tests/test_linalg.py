import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kernel_jl import linalg
from kernel_jl.errors import ConvergenceFailure, InvalidMatrix, InvalidRank, ShapeError
from kernel_jl.linalg import SeededRng, SymMatrix, gaussian_matrix, rank_d_pinv, sym_eigen

METHODS = ["jacobi", "lapack"]


def sym_matrices(max_order=8):
    return st.integers(1, max_order).flatmap(
        lambda n: arrays(np.float64, (n, n), elements=st.floats(-10, 10, allow_nan=False))
    ).map(lambda a: (a + a.T) / 2)


@pytest.mark.parametrize("method", METHODS)
def test_diagonal(method):
    e = sym_eigen(SymMatrix([[2.0, 0.0], [0.0, 1.0]]), method)
    np.testing.assert_allclose(e.eigenvalues, [2.0, 1.0])
    np.testing.assert_allclose(np.abs(e.eigenvectors), np.eye(2), atol=1e-12)


@pytest.mark.parametrize("method", METHODS)
def test_swap_matrix_closed_form(method):
    # [[0,1],[1,0]]: eigenpairs (1, (1,1)/sqrt2), (-1, (1,-1)/sqrt2)
    e = sym_eigen(SymMatrix([[0.0, 1.0], [1.0, 0.0]]), method)
    np.testing.assert_allclose(e.eigenvalues, [1.0, -1.0], atol=1e-14)
    s = 1 / np.sqrt(2)
    v = e.eigenvectors
    assert abs(abs(v[:, 0] @ [s, s]) - 1) < 1e-12
    assert abs(abs(v[:, 1] @ [s, -s]) - 1) < 1e-12


@pytest.mark.parametrize("method", METHODS)
def test_identity(method):
    e = sym_eigen(SymMatrix(np.eye(5)), method)
    np.testing.assert_array_equal(e.eigenvalues, np.ones(5))


def test_non_finite_rejected():
    with pytest.raises(InvalidMatrix):
        sym_eigen(np.array([[1.0, np.nan], [np.nan, 1.0]]))
    with pytest.raises(InvalidMatrix):
        SymMatrix([[1.0, np.inf], [np.inf, 1.0]])


def test_jacobi_iteration_cap():
    a = np.array([[1.0, 2.0], [2.0, 3.0]])
    with pytest.raises(ConvergenceFailure):
        linalg.jacobi_eigen(a, max_sweeps=0)


def test_symmetry_enforced():
    a = SymMatrix([[1.0, 2.0 + 1e-13], [2.0, 1.0]])
    assert a.entries[0, 1] == a.entries[1, 0]
    with pytest.raises(InvalidMatrix):
        SymMatrix([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ShapeError):
        SymMatrix(np.zeros((2, 3)))


@settings(max_examples=60, deadline=None)
@given(sym_matrices())
def test_jacobi_reconstruction_and_trace(a):
    e = sym_eigen(a, "jacobi")
    scale = max(1.0, np.abs(a).max())
    assert np.abs(e.reconstruct() - a).max() <= 1e-8 * scale
    assert np.abs(e.eigenvectors.T @ e.eigenvectors - np.eye(len(a))).max() <= 1e-8
    assert abs(np.trace(a) - e.eigenvalues.sum()) <= 1e-8 * scale
    assert np.all(np.diff(e.eigenvalues) <= 0)


@settings(max_examples=30, deadline=None)
@given(sym_matrices())
def test_jacobi_matches_lapack_spectrum(a):
    w1 = sym_eigen(a, "jacobi").eigenvalues
    w2 = sym_eigen(a, "lapack").eigenvalues
    np.testing.assert_allclose(w1, w2, atol=1e-8 * max(1.0, np.abs(a).max()))


def test_eigen_deterministic(rng):
    a = rng.standard_normal((6, 6))
    a = a + a.T
    for method in METHODS:
        e1, e2 = sym_eigen(a, method), sym_eigen(a, method)
        np.testing.assert_array_equal(e1.eigenvectors, e2.eigenvectors)


def test_pinv_examples():
    np.testing.assert_allclose(rank_d_pinv(np.diag([4.0, 1.0]), 1).entries, np.diag([0.25, 0.0]), atol=1e-15)
    np.testing.assert_allclose(rank_d_pinv(np.eye(3), 3).entries, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(rank_d_pinv(np.diag([1.0, 0.0]), 2, floor=1e-10).entries,
                               np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(InvalidRank):
        rank_d_pinv(np.eye(3), 4)
    with pytest.raises(InvalidRank):
        rank_d_pinv(np.eye(3), 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**31))
def test_pinv_reproduces_pd_matrix(n, seed):
    g = np.random.default_rng(seed).standard_normal((n, n))
    a = g @ g.T + n * np.eye(n)
    for method in METHODS:
        p = rank_d_pinv(a, n, 0.0, method).entries
        np.testing.assert_allclose(a @ p @ a, a, atol=1e-6)


def test_gaussian_matrix_deterministic():
    r = SeededRng(7, 3)
    np.testing.assert_array_equal(gaussian_matrix(r, 2, 3), gaussian_matrix(r, 2, 3))
    assert not np.array_equal(gaussian_matrix(SeededRng(7, 3), 2, 3), gaussian_matrix(SeededRng(8, 3), 2, 3))


def test_gaussian_matrix_moments():
    z = gaussian_matrix(SeededRng(11), 1, 100_000).ravel()
    assert abs(z.mean()) <= 4 / np.sqrt(100_000)
    assert abs(z.var() - 1) <= 0.02


def test_gaussian_matrix_validation():
    with pytest.raises(ShapeError):
        gaussian_matrix(SeededRng(0), 0, 3)
    with pytest.raises(ShapeError):
        gaussian_matrix(SeededRng(0), 3, 0)


def test_streams_uncorrelated():
    a = gaussian_matrix(SeededRng(5, 0), 1, 10_000).ravel()
    b = gaussian_matrix(SeededRng(5, 1), 1, 10_000).ravel()
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


def test_box_muller_odd_length():
    z = linalg.box_muller(SeededRng(1).generator(), 7)
    assert z.shape == (7,) and np.all(np.isfinite(z))


def test_products():
    np.testing.assert_array_equal(linalg.matvec([[1, 2], [3, 4]], [1, 1]), [3, 7])
    a = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(linalg.matmul(a, np.eye(3)), a)
    np.testing.assert_array_equal(linalg.transpose(a), a.T)
    with pytest.raises(ShapeError):
        linalg.matmul(np.ones((2, 3)), np.ones((2, 2)))
    with pytest.raises(ShapeError):
        linalg.matvec(np.ones((2, 3)), np.ones(2))


@pytest.mark.parametrize("n,d", [(200, 20), (201, 3), (7, 2), (1, 1)])
def test_apply_rows_is_batch_independent(rng, n, d):
    a = rng.standard_normal((d, n))
    rows = rng.random((700, n))
    full = linalg.apply_rows(a, rows)
    np.testing.assert_allclose(full, rows @ a.T, rtol=1e-12, atol=1e-12)
    for i in [0, 1, 255, 256, 257, 511, 699]:
        np.testing.assert_array_equal(linalg.apply_rows(a, rows[i:i + 1])[0], full[i])
    np.testing.assert_array_equal(linalg.apply_rows(a, rows[3:300]), full[3:300])
