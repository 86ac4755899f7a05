"""Empirical checks of the K-JL convergence results.

Ground truth for ``<K(., x), Sigma^3 K(., y)>`` is the plug-in covariance on a
large reference sample of size m, ``c_x^T C^2 c_y / m^3``. Everything here
uses uncentred Gram matrices.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import kolmogorov, ndtr

from . import sketch
from .errors import DegenerateData, InsufficientDraws, IoError, OracleTooSmall, ShapeError
from .kernel import GramMatrix, KernelSpec, as_points, cross_gram, gram
from .linalg import SeededRng, derive_seed, gaussian_matrix

# data_source(count, generator) -> (count, D) array of fresh i.i.d. points
DataSource = Callable[[int, np.random.Generator], np.ndarray]

AXES = ("n", "d")
KS_ALPHA = 0.01


@dataclass(frozen=True)
class ReferenceOracle:
    ref_pts: np.ndarray
    spec: KernelSpec
    gram: np.ndarray  # C, m x m
    gram_sq: np.ndarray  # C^2

    @property
    def m(self) -> int:
        return self.ref_pts.shape[0]


def fit_oracle(ref_pts, spec: KernelSpec) -> ReferenceOracle:
    ref = as_points(ref_pts)
    c = gram(spec, ref).matrix
    return ReferenceOracle(ref, spec, c, c @ c)


def oracle_features(o: ReferenceOracle, pts) -> np.ndarray:
    """Rows ``C c_x / m^{3/2}``; dot products of two rows give the oracle inner product."""
    c = cross_gram(o.spec, pts, o.ref_pts)
    return (c @ o.gram) / o.m ** 1.5


def oracle_inner(o: ReferenceOracle, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.shape[0] != o.ref_pts.shape[1]:
        raise ShapeError("probe points do not match the reference dimension")
    cx, cy = cross_gram(o.spec, np.vstack([x, y]), o.ref_pts)
    return float(cx @ o.gram_sq @ cy) / o.m ** 3


def empirical_inner(p: sketch.SketchProjector, x, y) -> float:
    return sketch.sketch_inner(p, x, y)


def _spectrum(g) -> np.ndarray:
    k = g.matrix if isinstance(g, GramMatrix) else np.asarray(g, dtype=float)
    return np.linalg.eigvalsh(k), float(np.trace(k))


def effective_dimension(g) -> float:
    """tr(K) / lambda_max(K), the plug-in tr(Sigma_n)/||Sigma_n||_op."""
    w, tr = _spectrum(g)
    top = w[-1]
    if top <= 0:
        raise DegenerateData("Gram matrix has no positive eigenvalue")
    return tr / top


def effective_dimension_cubed(g) -> float:
    w, _ = _spectrum(g)
    top = w[-1]
    if top <= 0:
        raise DegenerateData("Gram matrix has no positive eigenvalue")
    return float(np.sum((w / top) ** 3))


@dataclass
class ConvergenceReport:
    axis: str
    grid: list
    errors: list
    rep_std: list
    slope: float
    intercept: float
    records: list = field(default_factory=list)  # (value, rep, error)
    extra: dict = field(default_factory=dict)

    @property
    def slope_defined(self) -> bool:
        return bool(np.isfinite(self.slope))


def loglog_fit(grid, errors):
    """Least-squares slope and intercept of log(error) on log(grid); NaN for one point."""
    g = np.log(np.asarray(grid, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    if g.size < 2:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(g, e, 1)
    return float(slope), float(intercept)


def _summarize(axis, grid, per_cell, extra=None) -> ConvergenceReport:
    records = [(v, r, float(e)) for v, errs in zip(grid, per_cell) for r, e in enumerate(errs)]
    means = [float(np.mean(e)) for e in per_cell]
    stds = [float(np.std(e, ddof=1)) if len(e) > 1 else 0.0 for e in per_cell]
    if any(m <= 0 for m in means):
        raise DegenerateData("zero mean error: cannot fit a log-log rate")
    slope, intercept = loglog_fit(grid, means)
    return ConvergenceReport(axis, list(grid), means, stds, slope, intercept, records, extra or {})


def _check_grid(grid):
    grid = [int(v) for v in grid]
    if not grid or any(v < 1 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"grid must be strictly increasing positive integers, got {grid}")
    return grid


def rate_experiment(data_source: DataSource, oracle: ReferenceOracle, axis: str, grid,
                    fixed_other: int, reps: int = 20, probes: int = 50, seed: int = 0) -> ConvergenceReport:
    """Sup-error of sketched inner products against the oracle, swept over n or d.

    For each repetition a fresh set of ``probes`` point pairs is drawn and
    shared across the grid. Along ``axis="n"`` every cell draws a fresh
    subsample of that size from ``data_source`` and sketches it with
    ``d = fixed_other``. Along ``axis="d"`` the subsample has size
    ``fixed_other``; when that equals the oracle size the reference sample
    itself is sketched, which simulates the ideal projection exactly.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    grid = _check_grid(grid)
    m = oracle.m
    if axis == "n" and grid[-1] > m // 10:
        raise OracleTooSmall(f"largest n={grid[-1]} exceeds m/10={m // 10}")
    if axis == "d" and fixed_other > m:
        raise OracleTooSmall(f"n={fixed_other} exceeds the reference size m={m}")
    if axis == "d" and fixed_other != m and fixed_other > m // 10:
        warnings.warn("subsample size is more than m/10 of the reference sample", stacklevel=2)
    per_cell = [[] for _ in grid]
    for rep in range(reps):
        gen = SeededRng(derive_seed(seed, 0, rep)).generator()
        pts = as_points(data_source(2 * probes, gen))
        xs, ys = pts[:probes], pts[probes:]
        fx, fy = oracle_features(oracle, xs), oracle_features(oracle, ys)
        truth = np.sum(fx * fy, axis=1)
        for gi, v in enumerate(grid):
            n, d = (v, fixed_other) if axis == "n" else (fixed_other, v)
            cell_seed = derive_seed(seed, 1, rep, gi)
            if n == m:
                sub = oracle.ref_pts
            else:
                sub = as_points(data_source(n, SeededRng(cell_seed, 3).generator()))
            proj = sketch.fit(sub, oracle.spec, d, cell_seed, centered=False)
            ex = sketch.transform_batch(proj, xs).points
            ey = sketch.transform_batch(proj, ys).points
            est = np.sum(ex * ey, axis=1)
            per_cell[gi].append(float(np.max(np.abs(est - truth))))
    rep = _summarize(axis, grid, per_cell)
    rep.extra.update(fixed_other=fixed_other, reps=reps, probes=probes, m=m)
    return rep


def variance_convergence(oracle: ReferenceOracle, f_point, alpha, n_grid, reps: int,
                         seed: int, data_source: DataSource, mc_draws: int = 10_000,
                         mc_n: int | None = None) -> ConvergenceReport:
    """Variance of ``<alpha, V^T S_X f>`` for f = K(., f_point) against the ideal value.

    The exact conditional variance ``|alpha|^2 k_f^T K^2 k_f / (n^3 d)`` is
    compared with the target ``|alpha|^2 <f, Sigma_m^3 f> / d`` over
    ``reps`` subsamples per n. At ``mc_n`` (default: first grid value) the
    exact value is also checked against a Monte Carlo estimate over
    ``mc_draws`` sketch matrices.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    d = alpha.shape[0]
    a2 = float(alpha @ alpha)
    grid = _check_grid(n_grid)
    if grid[-1] > oracle.m // 10:
        raise OracleTooSmall(f"largest n={grid[-1]} exceeds m/10={oracle.m // 10}")
    f_point = np.atleast_1d(np.asarray(f_point, dtype=float))
    target = a2 * oracle_inner(oracle, f_point, f_point) / d
    mc_n = grid[0] if mc_n is None else mc_n
    per_cell = [[] for _ in grid]
    mc = {}
    for gi, n in enumerate(grid):
        for rep in range(reps):
            s = derive_seed(seed, n, rep)
            sub = as_points(data_source(n, SeededRng(s, 3).generator()))
            k = gram(oracle.spec, sub).matrix
            kf = cross_gram(oracle.spec, f_point[None, :], sub)[0]
            w = k @ kf
            exact = a2 * float(w @ w) / (n ** 3 * d)
            per_cell[gi].append(abs(exact - target))
            if n == mc_n and rep == 0:
                z = gaussian_matrix(SeededRng(s, sketch.SKETCH_STREAM), mc_draws * d, n).reshape(mc_draws, d, n)
                vals = np.einsum("d,rdn,n->r", alpha, z, w) * sketch.normalization(n, d)
                mc_var = float(np.var(vals, ddof=1))
                se = exact * np.sqrt(2.0 / (mc_draws - 1))
                zscore = (mc_var - exact) / se if se > 0 else (0.0 if mc_var == 0 else np.inf)
                mc = {"mc_n": n, "exact_var": exact, "mc_var": mc_var, "mc_z": float(zscore),
                      "mc_agree": bool(abs(zscore) <= 5.0)}
    if a2 == 0:
        rep = ConvergenceReport("n", grid, [0.0] * len(grid), [0.0] * len(grid), float("nan"), float("nan"),
                                [(v, r, 0.0) for v in grid for r in range(reps)])
    else:
        rep = _summarize("n", grid, per_cell)
    rep.extra.update(mc, target=target, d=d)
    return rep


@dataclass(frozen=True)
class DistributionReport:
    ks_statistic: float
    p_value: float
    passed: bool
    target_var: float
    sample_var: float
    var_z: float
    draws: int

    @property
    def variance_ok(self) -> bool:
        return abs(self.var_z) <= 5.0


def ks_statistic(sample, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance between a sample and a continuous cdf."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    f = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_pvalue(stat: float, n: int) -> float:
    """Asymptotic two-sided p-value, P(sqrt(n) D_n > sqrt(n) stat)."""
    return float(kolmogorov(np.sqrt(n) * stat))


def distribution_check(subsample, spec: KernelSpec, x, d: int, draws: int = 10_000,
                       seed: int = 0, coordinate: int = 0) -> DistributionReport:
    """KS test of one embedding coordinate of ``x`` over fresh sketches.

    The reference law is the exact conditional one, N(0, k_x^T K^2 k_x / (n^3 d)).
    Each draw is an independent d x n Gaussian sketch; only its row
    ``coordinate`` affects the tested value, so only that row is sampled.
    """
    if draws < 100:
        raise InsufficientDraws(f"need at least 100 draws, got {draws}")
    if not 0 <= coordinate < d:
        raise ShapeError(f"coordinate {coordinate} outside [0, {d})")
    sub = as_points(subsample)
    n = sub.shape[0]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = gram(spec, sub).matrix
    kx = cross_gram(spec, x[None, :], sub)[0]
    w = k @ kx
    target = float(w @ w) / (n ** 3 * d)
    if not target > 1e-300:
        raise DegenerateData("feature vector of x is numerically zero; coordinate law is degenerate")
    z = gaussian_matrix(SeededRng(seed, sketch.SKETCH_STREAM), draws, n)
    vals = (z @ w) * sketch.normalization(n, d)
    sd = np.sqrt(target)
    stat = ks_statistic(vals / sd, ndtr)
    p = ks_pvalue(stat, draws)
    sample_var = float(np.var(vals, ddof=1))
    var_z = (sample_var - target) / (target * np.sqrt(2.0 / (draws - 1)))
    return DistributionReport(stat, p, p > KS_ALPHA, target, sample_var, float(var_z), draws)


def write_report_csv(report: ConvergenceReport, path) -> None:
    """Columns axis,value,rep,error,slope,intercept; the last row (value=summary) holds the fit."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["axis", "value", "rep", "error", "slope", "intercept"])
            for v, r, e in report.records:
                w.writerow([report.axis, v, r, format(e, ".17g"), "", ""])
            w.writerow([report.axis, "summary", "", "", format(report.slope, ".17g"),
                        format(report.intercept, ".17g")])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_report_csv(path) -> ConvergenceReport:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    summary = rows[-1]
    cells: dict = {}
    for r in rows[:-1]:
        cells.setdefault(int(r["value"]), []).append(float(r["error"]))
    grid = sorted(cells)
    rep = _summarize(summary["axis"], grid, [cells[v] for v in grid])
    rep.slope, rep.intercept = float(summary["slope"]), float(summary["intercept"])
    return rep
