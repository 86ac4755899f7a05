"""k-means (k-means++ seeding, Lloyd iterations) and the Rand index."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import EmptyData, InvalidK, ShapeError
from .linalg import SeededRng

DEFAULT_RESTARTS = 10
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size < 1:
            raise ShapeError("a partition needs a non-empty 1-D label array")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ShapeError(f"labels must lie in [0, {self.k})")

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Relabel arbitrary hashable labels to dense ids in first-appearance order."""
        ids: dict = {}
        dense = np.array([ids.setdefault(lab, len(ids)) for lab in np.asarray(labels).tolist()], dtype=np.int64)
        return cls(dense, len(ids))

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class KmeansResult:
    partition: Partition
    centers: np.ndarray
    objective: float
    iterations: int
    converged: bool
    trace: tuple = field(default=(), repr=False)


def objective(points: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    diff = points - centers[labels]
    return float(np.sum(diff * diff))


def kmeans_pp_init(points: np.ndarray, k: int, gen: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(gen.integers(n))]
    d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(d2), gen.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:  # fewer distinct points than k; empty-cluster repair sorts it out
            idx = int(gen.integers(n))
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1))
    return points[chosen].copy()


def _centers(points, labels, k, old):
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, points.shape[1]))
    np.add.at(sums, labels, points)
    out = old.copy()
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz, None]
    return out


def _repair_empty(points, d2, labels, k):
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        own = d2[np.arange(len(labels)), labels]
        # only donate from clusters that keep at least one member
        own = np.where(counts[labels] > 1, own, -np.inf)
        i = int(np.argmax(own))
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
        d2[i, :] = np.inf
        d2[i, j] = 0.0
    return labels


def _lloyd(points, centers, max_iter):
    k = centers.shape[0]
    labels = None
    trace = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        d2 = cdist(points, centers, "sqeuclidean")
        new = np.argmin(d2, axis=1)  # ties go to the lowest index
        new = _repair_empty(points, d2, new, k)
        if labels is not None and np.array_equal(new, labels):
            converged = True
            it -= 1
            break
        labels = new
        centers = _centers(points, labels, k, centers)
        trace.append(objective(points, centers, labels))
    return labels, centers, trace, max(it, 1), converged


def kmeans(points, k: int, seed: int = 0, max_iter: int = DEFAULT_MAX_ITER,
           restarts: int = DEFAULT_RESTARTS) -> KmeansResult:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise EmptyData("kmeans needs a non-empty N x d matrix")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise InvalidK(f"k={k} must lie in [1, {n}]")
    if max_iter < 1 or restarts < 1:
        raise ValueError("max_iter and restarts must be >= 1")
    best = None
    for r in range(restarts):
        gen = SeededRng(seed, r).generator()
        labels, centers, trace, iters, conv = _lloyd(points, kmeans_pp_init(points, k, gen), max_iter)
        obj = objective(points, centers, labels)
        if best is None or obj < best.objective:
            best = KmeansResult(Partition(labels, k), centers, obj, iters, conv, tuple(trace))
    return best


def _labels(p) -> np.ndarray:
    if isinstance(p, Partition):
        return np.asarray(p.labels)
    return np.asarray(p)


def _pairs(m):
    m = np.asarray(m, dtype=np.int64)
    return int(np.sum(m * (m - 1) // 2))


def rand_index(a, b) -> float:
    """Fraction of point pairs on which two partitions agree, via the contingency table."""
    la, lb = _labels(a), _labels(b)
    if la.shape != lb.shape:
        raise ShapeError(f"partitions have different lengths: {la.shape} vs {lb.shape}")
    n = la.shape[0]
    if n < 2:
        return 1.0
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    kb = ib.max() + 1
    table = np.bincount(ia * kb + ib, minlength=(ia.max() + 1) * kb)
    together_both = _pairs(table)
    together_a = _pairs(np.bincount(ia))
    together_b = _pairs(np.bincount(ib))
    total = n * (n - 1) // 2
    agree = total + 2 * together_both - together_a - together_b
    return agree / total

