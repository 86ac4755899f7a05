"""Kernel Johnson-Lindenstrauss projection.

A projector is fitted on a subsample ``X`` of size n: with ``K`` the Gram
matrix on ``X`` and ``Z`` a d x n standard Gaussian matrix, it stores

    P = Z K / (n^{3/2} sqrt(d))

and maps a point ``x`` to ``P k_x`` where ``k_x = (K(X_1, x), ..., K(X_n, x))``.
Inner products of mapped points are unbiased for ``k_x^T K^2 k_y / n^3``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRank, ShapeError
from .kernel import (GramMatrix, KernelSpec, as_points, center_cross, center_gram, cross_gram, gram,
                     kernel_apply)
from .linalg import SeededRng, apply_rows, gaussian_matrix, matmul

# stream id reserved for the sketch matrix Z; subsampling uses other streams
SKETCH_STREAM = 1


@dataclass(frozen=True)
class Embedding:
    points: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class SketchProjector:
    subsample: np.ndarray
    spec: KernelSpec
    centered: bool
    gram: GramMatrix
    sketch: np.ndarray
    seed: int
    center_oos: bool = True

    @property
    def n(self) -> int:
        return self.sketch.shape[1]

    @property
    def d(self) -> int:
        return self.sketch.shape[0]

    def meta(self) -> dict:
        return {"n": self.n, "d": self.d, "seed": self.seed,
                "bandwidth_sq": self.spec.bandwidth_sq, "centered": self.centered}


def normalization(n: int, d: int) -> float:
    return 1.0 / (n ** 1.5 * np.sqrt(d))


def fit(pts, spec: KernelSpec, d: int, seed: int, centered: bool = True,
        center_oos: bool = True, z: np.ndarray | None = None) -> SketchProjector:
    """Fit a K-JL projector on the subsample ``pts``.

    ``z`` overrides the seeded Gaussian draw (shape d x n); intended for
    tests and for experiments that reuse one sketch across settings.
    """
    pts = as_points(pts)
    if d < 1:
        raise InvalidRank(f"projection dimension must be >= 1, got {d}")
    n = pts.shape[0]
    g = gram(spec, pts)
    if centered:
        g = center_gram(g)
    if z is None:
        z = gaussian_matrix(SeededRng(seed, SKETCH_STREAM), d, n)
    else:
        z = np.asarray(z, dtype=float)
        if z.shape != (d, n):
            raise ShapeError(f"z must have shape {(d, n)}, got {z.shape}")
    p = matmul(z, g.matrix) * normalization(n, d)
    p.setflags(write=False)
    pts = pts.copy()
    pts.setflags(write=False)
    return SketchProjector(pts, spec, centered, g, p, seed, center_oos)


def feature_vectors(p: SketchProjector, pts) -> np.ndarray:
    """Rows ``k_x`` for each point, centred when the projector is."""
    pts = as_points(pts, allow_empty=True)
    if pts.shape[0] and pts.shape[1] != p.subsample.shape[1]:
        raise ShapeError(f"points have dimension {pts.shape[1]}, projector expects {p.subsample.shape[1]}")
    k = cross_gram(p.spec, pts, p.subsample)
    if p.centered and p.center_oos and k.shape[0]:
        k = center_cross(p.gram, k)
    return k


def apply(p: SketchProjector, kvecs) -> np.ndarray:
    """Apply the sketch to precomputed feature vectors (rows)."""
    kvecs = np.asarray(kvecs, dtype=float)
    if kvecs.ndim == 1:
        return apply_rows(p.sketch, kvecs[None, :])[0]
    return apply_rows(p.sketch, kvecs)


def centering_offset(p: SketchProjector) -> np.ndarray:
    """``P r`` where r holds the row means of the uncentred Gram matrix.

    Since the centred Gram annihilates the ones vector, ``P 1 = 0`` and so
    ``P center_cross(k) = P k - P r``: centring a test column reduces to
    subtracting this fixed vector.
    """
    return p.sketch @ p.gram.row_means


def transform_batch(p: SketchProjector, pts) -> Embedding:
    pts = as_points(pts, allow_empty=True)
    if pts.shape[0] and pts.shape[1] != p.subsample.shape[1]:
        raise ShapeError(f"points have dimension {pts.shape[1]}, projector expects {p.subsample.shape[1]}")
    if pts.shape[0] == 0:
        return Embedding(np.empty((0, p.d)), "kjl", p.meta())
    shift = centering_offset(p) if p.centered and p.center_oos else None
    return Embedding(kernel_apply(p.spec, pts, p.subsample, p.sketch, shift), "kjl", p.meta())


def transform(p: SketchProjector, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return transform_batch(p, x[None, :]).points[0]


def sketch_inner(p: SketchProjector, x, y) -> float:
    return float(transform(p, x) @ transform(p, y))


def expected_inner(p: SketchProjector, x, y) -> float:
    """Mean of :func:`sketch_inner` over the Gaussian draw, ``k_x^T K^2 k_y / n^3``."""
    kx, ky = feature_vectors(p, np.vstack([np.atleast_1d(x), np.atleast_1d(y)]))
    k = p.gram.matrix
    return float((k @ kx) @ (k @ ky)) / p.n ** 3


def coordinate_variance(p: SketchProjector, x) -> float:
    """Exact variance of each embedding coordinate of ``x`` given the subsample."""
    kx = feature_vectors(p, np.atleast_2d(np.asarray(x, dtype=float)))[0]
    v = p.gram.matrix @ kx
    return float(v @ v) / (p.n ** 3 * p.d)


def sample_vhat(g: GramMatrix, rng: SeededRng, count: int) -> np.ndarray:
    """Columns ``K z / sqrt(n)`` with ``z ~ N(0, I)``, i.e. draws from N(0, K^2/n)."""
    if count < 1:
        raise ShapeError(f"count must be >= 1, got {count}")
    z = gaussian_matrix(rng, g.n, count)
    return matmul(g.matrix, z) / np.sqrt(g.n)
