"""Dense symmetric linear algebra and seeded Gaussian sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, InvalidMatrix, InvalidRank, ShapeError

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12
PINV_RELATIVE_FLOOR = 1e-10


class SymMatrix:
    """Immutable symmetric matrix.

    The strict upper triangle is mirrored onto the lower one at construction,
    so ``entries[i, j] == entries[j, i]`` holds exactly afterwards. Inputs that
    are not symmetric to within ``1e-10`` relative are rejected.
    """

    __slots__ = ("_a",)

    def __init__(self, entries, check=True):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ShapeError(f"expected a non-empty square matrix, got shape {a.shape}")
        if check:
            if not np.all(np.isfinite(a)):
                raise InvalidMatrix("matrix has non-finite entries")
            scale = max(1.0, float(np.max(np.abs(a))))
            if np.max(np.abs(a - a.T)) > 1e-10 * scale:
                raise InvalidMatrix("matrix is not symmetric")
        np.copyto(a, a.T, where=np.tri(a.shape[0], k=-1, dtype=bool))
        a.setflags(write=False)
        self._a = a

    @property
    def entries(self) -> np.ndarray:
        return self._a

    @property
    def order(self) -> int:
        return self._a.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self):
        return f"SymMatrix(order={self.order})"


def _as_array(a) -> np.ndarray:
    return a.entries if isinstance(a, SymMatrix) else np.asarray(a, dtype=float)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # non-increasing
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def _fix_signs(v: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each eigenvector made positive
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _off_norm(a: np.ndarray) -> float:
    return float(np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2)))


def jacobi_eigen(a: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS, tol: float = JACOBI_TOL):
    """Cyclic Jacobi eigenvalue iteration for a dense symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` unsorted. Sweeps visit every
    ``(p, q)`` pair with ``p < q`` in row order and stop once the off-diagonal
    Frobenius norm drops below ``tol * ||A||_F``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        if _off_norm(a) <= target:
            return a.diagonal().copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = a[q, q] - a[p, p]
                if abs(theta) > 1e150 * abs(apq):
                    t = apq / theta  # tan of a tiny angle; avoids tau**2 overflow
                else:
                    tau = theta / (2.0 * apq)
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = _off_norm(a)
    if off <= target:
        return a.diagonal().copy(), v
    raise ConvergenceFailure(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")


def sym_eigen(a, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted non-increasing.

    ``method="jacobi"`` runs the in-house cyclic Jacobi solver; ``"lapack"``
    (default) defers to ``numpy.linalg.eigh``. Both return sign-normalised
    eigenvectors so results are deterministic for a fixed input.
    """
    arr = _as_array(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("matrix has non-finite entries")
    if method == "jacobi":
        w, v = jacobi_eigen(arr)
    elif method == "lapack":
        try:
            w, v = np.linalg.eigh(arr)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _fix_signs(v[:, order])
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(w, v)


def default_floor(eigenvalues) -> float:
    lam_max = float(np.max(eigenvalues)) if len(eigenvalues) else 0.0
    return PINV_RELATIVE_FLOOR * max(lam_max, 0.0)


def top_eigenpairs(a, d: int, floor: float | None = None, method: str = "lapack"):
    """Top-``d`` eigenpairs of ``a`` with eigenvalue strictly above ``floor``.

    May return fewer than ``d`` pairs; callers decide whether that is an error.
    """
    order = _as_array(a).shape[0]
    if not 1 <= d <= order:
        raise InvalidRank(f"d={d} outside [1, {order}]")
    eig = sym_eigen(a, method=method)
    if floor is None:
        floor = default_floor(eig.eigenvalues)
    w = eig.eigenvalues[:d]
    keep = w > floor
    return w[keep], eig.eigenvectors[:, :d][:, keep]


def rank_d_pinv(a, d: int, floor: float | None = None, method: str = "lapack") -> SymMatrix:
    """Rank-``d`` pseudo-inverse; eigenvalues at or below ``floor`` are dropped.

    ``floor=None`` uses ``1e-10 * lambda_max``.
    """
    w, v = top_eigenpairs(a, d, floor, method)
    return SymMatrix((v / w) @ v.T, check=False)


@dataclass(frozen=True)
class SeededRng:
    """A reproducible random stream identified by ``(seed, stream)``.

    Each call to :meth:`generator` restarts the stream from its beginning;
    distinct stream ids give statistically independent Philox substreams.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed) % 2**64, spawn_key=(int(self.stream) % 2**64,))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *keys: int) -> "SeededRng":
        return SeededRng(derive_seed(self.seed, self.stream, *keys), 0)


def derive_seed(*keys: int) -> int:
    """Hash a tuple of integers into a fresh 63-bit seed."""
    ss = np.random.SeedSequence([int(k) % 2**64 for k in keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def box_muller(gen: np.random.Generator, size: int) -> np.ndarray:
    half = (size + 1) // 2
    u1 = 1.0 - gen.random(half)  # (0, 1], keeps log finite
    u2 = gen.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:size]


def gaussian_matrix(rng: SeededRng, rows: int, cols: int) -> np.ndarray:
    if rows < 1 or cols < 1:
        raise ShapeError(f"gaussian_matrix needs rows, cols >= 1, got {rows}x{cols}")
    return box_muller(rng.generator(), rows * cols).reshape(rows, cols)


def matmul(a, b) -> np.ndarray:
    a, b = _as_array(a), _as_array(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def matvec(a, x) -> np.ndarray:
    a, x = _as_array(a), np.asarray(x, dtype=float)
    if a.ndim != 2 or x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by vector {x.shape}")
    return a @ x


def transpose(a) -> np.ndarray:
    a = _as_array(a)
    if a.ndim != 2:
        raise ShapeError(f"transpose expects a matrix, got shape {a.shape}")
    return a.T.copy()


ROW_BLOCK = 256


def apply_rows(a: np.ndarray, rows: np.ndarray, shift: np.ndarray | None = None) -> np.ndarray:
    """``rows @ a.T - shift`` with each output row independent of the batch it came in.

    A plain GEMM gives row results that can differ in the last bit depending
    on the batch shape. Rows are therefore pushed through GEMMs of a fixed
    ``ROW_BLOCK`` height, zero-padding the final block, so a single row and
    the same row inside a large batch take the same arithmetic path. The
    optional ``shift`` is subtracted block by block while the block is hot.
    """
    a = _as_array(a)
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != a.shape[1]:
        raise ShapeError(f"rows of shape {rows.shape} do not match operator {a.shape}")
    at = np.ascontiguousarray(a.T)
    n_rows = rows.shape[0]
    out = np.empty((n_rows, a.shape[0]))
    buf = None
    for start in range(0, n_rows, ROW_BLOCK):
        stop = min(start + ROW_BLOCK, n_rows)
        if stop - start == ROW_BLOCK:
            out[start:stop] = rows[start:stop] @ at
        else:
            if buf is None:
                buf = np.zeros((ROW_BLOCK, rows.shape[1]))
            buf[: stop - start] = rows[start:stop]
            buf[stop - start:] = 0.0
            out[start:stop] = (buf @ at)[: stop - start]
        if shift is not None:
            out[start:stop] -= shift
    return out
