"""Gaussian kernel evaluation, Gram assembly, bandwidth choice and centering."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DegenerateData, EmptyData, InvalidSpec, ShapeError, StateError
from .linalg import ROW_BLOCK, SeededRng, SymMatrix, apply_rows

MAX_BANDWIDTH_PAIRS = 10**6


@dataclass(frozen=True)
class KernelSpec:
    bandwidth_sq: float
    family: str = "gaussian"

    def __post_init__(self):
        if self.family != "gaussian":
            raise InvalidSpec(f"unsupported kernel family {self.family!r}")
        if not (math.isfinite(self.bandwidth_sq) and self.bandwidth_sq > 0):
            raise InvalidSpec(f"bandwidth_sq must be positive and finite, got {self.bandwidth_sq}")

    @classmethod
    def from_sigma(cls, sigma: float) -> "KernelSpec":
        return cls(float(sigma) ** 2)

    @property
    def kappa(self) -> float:
        """sup_x K(x, x)."""
        return 1.0


def as_points(pts, allow_empty: bool = False) -> np.ndarray:
    a = np.asarray(pts, dtype=float)
    if a.ndim == 1:
        a = a[:, None] if a.size else a.reshape(0, 0)
    if a.ndim != 2:
        raise ShapeError(f"points must be a 2-D array, got shape {a.shape}")
    if a.shape[0] == 0 and not allow_empty:
        raise EmptyData("no points given")
    if not np.all(np.isfinite(a)):
        raise ShapeError("points contain non-finite values")
    return a


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ShapeError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.exp(-float(diff @ diff) / spec.bandwidth_sq))


def _kernel_from_sqdist(spec: KernelSpec, d2: np.ndarray) -> np.ndarray:
    # in place: d2 is always a fresh cdist buffer
    np.divide(d2, -spec.bandwidth_sq, out=d2)
    return np.exp(d2, out=d2)


@dataclass(frozen=True)
class GramMatrix:
    """An n x n kernel matrix, optionally double-centred.

    When ``centered`` is set, ``base`` holds the centred matrix and
    ``row_means``/``grand_mean`` are statistics of the *uncentred* matrix,
    kept for centring out-of-sample kernel columns.
    """

    base: SymMatrix
    centered: bool = False
    row_means: np.ndarray | None = field(default=None, repr=False)
    grand_mean: float | None = None

    @property
    def matrix(self) -> np.ndarray:
        return self.base.entries

    @property
    def n(self) -> int:
        return self.base.order


def gram(spec: KernelSpec, pts) -> GramMatrix:
    pts = as_points(pts)
    k = _kernel_from_sqdist(spec, cdist(pts, pts, "sqeuclidean"))
    return GramMatrix(SymMatrix(k, check=False))


def cross_gram(spec: KernelSpec, rows, cols) -> np.ndarray:
    """Kernel values between every row point and every column point."""
    rows = as_points(rows, allow_empty=True)
    cols = as_points(cols)
    if rows.shape[0] == 0:
        return np.empty((0, cols.shape[0]))
    if rows.shape[1] != cols.shape[1]:
        raise ShapeError(f"dimension mismatch: {rows.shape[1]} vs {cols.shape[1]}")
    return _kernel_from_sqdist(spec, cdist(rows, cols, "sqeuclidean"))


def kernel_apply(spec: KernelSpec, rows, cols, a: np.ndarray, shift=None, prep=None) -> np.ndarray:
    """``prep(cross_gram(rows, cols)) @ a.T - shift`` without materialising the N x n kernel block.

    Kernel rows are produced ``ROW_BLOCK`` at a time and consumed at once,
    so memory stays at O(ROW_BLOCK * n) and every output row follows the
    same arithmetic path whatever the batch size. ``prep`` maps a block of
    kernel rows to feature rows (e.g. centring) and must act row by row.
    """
    rows = as_points(rows, allow_empty=True)
    out = np.empty((rows.shape[0], a.shape[0]))
    for start in range(0, rows.shape[0], ROW_BLOCK):
        k = cross_gram(spec, rows[start:start + ROW_BLOCK], cols)
        if prep is not None:
            k = prep(k)
        out[start:start + ROW_BLOCK] = apply_rows(a, k, shift)
    return out


def nearest_rank(values: np.ndarray, percentile: float) -> float:
    if not 0 < percentile < 100:
        raise InvalidSpec(f"percentile must lie in (0, 100), got {percentile}")
    v = np.sort(np.asarray(values, dtype=float))
    rank = max(1, math.ceil(percentile / 100.0 * v.size))
    return float(v[rank - 1])


def pairwise_distances(pts, rng: SeededRng | None = None, max_pairs: int | None = None) -> np.ndarray:
    """Distances ``||x_i - x_j||`` over ``i < j``.

    With ``max_pairs`` set and exceeded, a uniform random subset of that many
    pairs (drawn with replacement from ``rng``) is used instead.
    """
    pts = as_points(pts)
    n = pts.shape[0]
    total = n * (n - 1) // 2
    if max_pairs is None or total <= max_pairs:
        return pdist(pts)
    if rng is None:
        raise StateError("sampling pairs needs an rng")
    gen = rng.generator()
    i = gen.integers(0, n, size=max_pairs)
    j = gen.integers(0, n - 1, size=max_pairs)
    j = j + (j >= i)  # uniform over j != i
    return np.sqrt(np.sum((pts[i] - pts[j]) ** 2, axis=1))


def select_bandwidth(pts, percentile: float = 25.0, rng: SeededRng | None = None,
                     max_pairs: int | None = None) -> float:
    """Nearest-rank percentile of interpoint distances (the length scale sigma)."""
    pts = as_points(pts)
    if pts.shape[0] < 2:
        raise EmptyData("bandwidth selection needs at least 2 points")
    dist = pairwise_distances(pts, rng, max_pairs)
    if not np.any(dist > 0):
        raise DegenerateData("all interpoint distances are zero")
    sigma = nearest_rank(dist, percentile)
    if sigma <= 0:
        raise DegenerateData(f"the {percentile}th percentile distance is zero")
    return sigma


def center_matrix(k: np.ndarray) -> np.ndarray:
    """H K H with H = I - 11^T/n."""
    r = k.mean(axis=1)
    return k - r[:, None] - r[None, :] + r.mean()


def center_gram(g: GramMatrix) -> GramMatrix:
    if g.centered:
        raise StateError("Gram matrix is already centred")
    k = g.matrix
    row_means = k.mean(axis=1)
    grand = float(row_means.mean())
    kc = k - row_means[:, None] - row_means[None, :] + grand
    row_means.setflags(write=False)
    return GramMatrix(SymMatrix(kc, check=False), True, row_means, grand)


def center_cross(g: GramMatrix, kx) -> np.ndarray:
    """Centre out-of-sample kernel columns against the training Gram statistics.

    ``kx`` is a length-n vector or an (N, n) array of such vectors as rows.
    """
    if not g.centered or g.row_means is None:
        raise StateError("centring state missing: Gram matrix is not centred")
    kx = np.asarray(kx, dtype=float)
    if kx.shape[-1] != g.n:
        raise ShapeError(f"expected length-{g.n} kernel columns, got {kx.shape}")
    return kx - g.row_means - kx.mean(axis=-1, keepdims=True) + g.grand_mean
