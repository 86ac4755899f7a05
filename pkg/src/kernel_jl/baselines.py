"""Comparison embeddings: subsample KPCA and rank-d Nystrom."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidRank, RankDeficient, ShapeError
from .kernel import (GramMatrix, KernelSpec, as_points, center_cross, center_gram, cross_gram, gram,
                     kernel_apply)
from .linalg import top_eigenpairs
from .sketch import Embedding

KPCA_MODES = ("paper_literal", "unit_norm")


@dataclass(frozen=True)
class KpcaProjector:
    """KPCA fitted on the centred Gram matrix of a subsample.

    ``paper_literal`` maps x to ``sum_i alpha_i K(x, x_i)`` with unit-norm
    eigenvectors and raw kernel values; ``unit_norm`` divides each
    eigenvector by sqrt(eigenvalue) and centres the test column first.
    """

    subsample: np.ndarray
    spec: KernelSpec
    gram: GramMatrix  # centred
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # n x d, unit columns
    mode: str

    @property
    def weights(self) -> np.ndarray:
        """d x n matrix whose rows are the coefficient vectors applied to k_x."""
        if self.mode == "unit_norm":
            return (self.eigenvectors / np.sqrt(self.eigenvalues)).T
        return self.eigenvectors.T

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class NystromProjector:
    subsample: np.ndarray
    spec: KernelSpec
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    weights: np.ndarray  # Lambda^{-1/2} U^T, d x n

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[0]


def _top(k, d: int, floor: float | None, what: str):
    n = k.shape[0]
    if not 1 <= d <= n:
        raise InvalidRank(f"d={d} outside [1, {n}]")
    w, v = top_eigenpairs(k, d, floor)
    if w.shape[0] < d:
        raise RankDeficient(f"{what}: only {w.shape[0]} eigenvalues above the floor, d={d} requested",
                            achievable_rank=int(w.shape[0]))
    return w, v


def kpca_fit(pts, spec: KernelSpec, d: int, mode: str = "paper_literal",
             floor: float | None = None) -> KpcaProjector:
    if mode not in KPCA_MODES:
        raise ValueError(f"unknown KPCA mode {mode!r}")
    pts = as_points(pts)
    g = center_gram(gram(spec, pts))
    w, v = _top(g.matrix, d, floor, "KPCA")
    return KpcaProjector(pts, spec, g, w, v, mode)


def kpca_features(p: KpcaProjector, pts) -> np.ndarray:
    k = cross_gram(p.spec, pts, p.subsample)
    if p.mode == "unit_norm" and k.shape[0]:
        k = center_cross(p.gram, k)
    return k


def kpca_transform_batch(p: KpcaProjector, pts) -> Embedding:
    pts = _check_dim(pts, p.subsample)
    prep = (lambda k: center_cross(p.gram, k)) if p.mode == "unit_norm" else None
    out = kernel_apply(p.spec, pts, p.subsample, p.weights, prep=prep)
    return Embedding(out, "kpca", {"n": p.subsample.shape[0], "d": p.d, "mode": p.mode,
                                   "bandwidth_sq": p.spec.bandwidth_sq, "centered": True})


def kpca_transform(p: KpcaProjector, x) -> np.ndarray:
    return kpca_transform_batch(p, np.atleast_1d(np.asarray(x, dtype=float))[None, :]).points[0]


def nystrom_fit(pts, spec: KernelSpec, d: int, floor: float | None = None) -> NystromProjector:
    pts = as_points(pts)
    k = gram(spec, pts).matrix
    w, v = _top(k, d, floor, "Nystrom")
    weights = (v / np.sqrt(w)).T
    return NystromProjector(pts, spec, w, v, weights)


def nystrom_transform_batch(p: NystromProjector, pts) -> Embedding:
    pts = _check_dim(pts, p.subsample)
    out = kernel_apply(p.spec, pts, p.subsample, p.weights)
    return Embedding(out, "nystrom", {"n": p.subsample.shape[0], "d": p.d,
                                      "bandwidth_sq": p.spec.bandwidth_sq, "centered": False})


def nystrom_transform(p: NystromProjector, x) -> np.ndarray:
    return nystrom_transform_batch(p, np.atleast_1d(np.asarray(x, dtype=float))[None, :]).points[0]


def _check_dim(pts, subsample):
    pts = as_points(pts, allow_empty=True)
    if pts.shape[0] and pts.shape[1] != subsample.shape[1]:
        raise ShapeError(f"points have dimension {pts.shape[1]}, projector expects {subsample.shape[1]}")
    return pts
