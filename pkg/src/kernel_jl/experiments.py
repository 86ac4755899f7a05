"""Clustering benchmark pipeline shared by the CLI and the scripts."""
from __future__ import annotations

import gc
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines, sketch
from .clustering import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, kmeans, rand_index
from .data import Dataset, SynthSpec, generate, subsample
from .errors import ConfigError, InvalidSize
from .kernel import KernelSpec, select_bandwidth, MAX_BANDWIDTH_PAIRS
from .linalg import SeededRng, derive_seed

METHODS = ("raw", "nystrom", "kpca", "kjl")
_METHOD_CODE = {m: i for i, m in enumerate(METHODS)}
WORKERS_ENV = "KJL_WORKERS"


@dataclass(frozen=True)
class PipelineConfig:
    n: int
    d: int
    k: int
    percentile: float = 25.0
    centered: bool = True
    center_oos: bool = True
    kpca_mode: str = "paper_literal"
    bandwidth_scope: str = "subsample"  # or "full": capped random pairs of the whole data set
    paired: bool = True
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER


@dataclass(frozen=True)
class BenchRecord:
    method: str
    rep: int
    seed: int
    preprocess_seconds: float
    rand_index: float
    n: int
    d: int
    k: int

    FIELDS = ("method", "rep", "seed", "preprocess_seconds", "rand_index", "n", "d", "k")
    TIMING_FIELDS = ("preprocess_seconds",)


@dataclass
class Projection:
    points: np.ndarray
    seconds: float
    bandwidth_sq: float | None
    meta: dict = field(default_factory=dict)


def rep_seeds(master: int, rep: int, method: str, paired: bool = True):
    """(subsample seed, projection seed, k-means seed) for one repetition of one method.

    With pairing, all methods in a repetition share the subsample.
    """
    code = _METHOD_CODE[method]
    sub = derive_seed(master, rep) if paired else derive_seed(master, rep, code, 1)
    return sub, derive_seed(master, rep, code, 2), derive_seed(master, rep, code, 3)


def bandwidth(ds: Dataset, sub_pts: np.ndarray, cfg: PipelineConfig, seed: int) -> KernelSpec:
    if cfg.bandwidth_scope == "full":
        sigma = select_bandwidth(ds.features, cfg.percentile, SeededRng(seed, 4), MAX_BANDWIDTH_PAIRS)
    elif cfg.bandwidth_scope == "subsample":
        sigma = select_bandwidth(sub_pts, cfg.percentile)
    else:
        raise ConfigError(f"unknown bandwidth scope {cfg.bandwidth_scope!r}")
    return KernelSpec.from_sigma(sigma)


def project(ds: Dataset, method: str, cfg: PipelineConfig, sub_seed: int, proj_seed: int) -> Projection:
    """Fit ``method`` on a subsample and map the whole data set.

    ``seconds`` covers exactly fit + batch transform.
    """
    if method == "raw":
        return Projection(ds.features.copy(), 0.0, None, {"method": "raw"})
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    if not 1 <= cfg.n <= ds.N:
        raise InvalidSize(f"subsample size n={cfg.n} outside [1, {ds.N}]")
    sub_pts, _ = subsample(ds, cfg.n, sub_seed)
    spec = bandwidth(ds, sub_pts, cfg, sub_seed)
    gc_was_enabled = gc.isenabled()
    gc.disable()  # as timeit does: keep collector pauses out of the measurement
    try:
        t0 = time.perf_counter()
        if method == "kjl":
            p = sketch.fit(sub_pts, spec, cfg.d, proj_seed, cfg.centered, cfg.center_oos)
            emb = sketch.transform_batch(p, ds.features)
        elif method == "kpca":
            p = baselines.kpca_fit(sub_pts, spec, cfg.d, cfg.kpca_mode)
            emb = baselines.kpca_transform_batch(p, ds.features)
        else:
            p = baselines.nystrom_fit(sub_pts, spec, cfg.d)
            emb = baselines.nystrom_transform_batch(p, ds.features)
        seconds = time.perf_counter() - t0
    finally:
        if gc_was_enabled:
            gc.enable()
    meta = dict(emb.meta, method=method, seed=proj_seed)
    return Projection(emb.points, seconds, spec.bandwidth_sq, meta)


def run_rep(ds: Dataset, method: str, cfg: PipelineConfig, master: int, rep: int) -> BenchRecord:
    if ds.labels is None:
        raise ConfigError("benchmarking needs labelled data")
    sub_seed, proj_seed, km_seed = rep_seeds(master, rep, method, cfg.paired)
    proj = project(ds, method, cfg, sub_seed, proj_seed)
    res = kmeans(proj.points, cfg.k, km_seed, cfg.max_iter, cfg.restarts)
    ri = rand_index(res.partition, ds.labels)
    return BenchRecord(method, rep, proj_seed, proj.seconds, ri, cfg.n, cfg.d, cfg.k)


def _run_cell(args):
    return run_rep(*args)


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer") from exc


def bench(ds: Dataset, methods, cfg: PipelineConfig, reps: int, master: int,
          workers: int | None = None) -> list[BenchRecord]:
    """All (rep, method) cells; output order is (rep, method) whatever the schedule."""
    if reps < 1:
        raise ConfigError("reps must be >= 1")
    cells = [(ds, m, cfg, master, r) for r in range(reps) for m in methods]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_run_cell, cells))
    return [_run_cell(c) for c in cells]


def summarize(records: list[BenchRecord]) -> list[dict]:
    out = []
    for m in dict.fromkeys(r.method for r in records):
        rs = [r for r in records if r.method == m]
        ri = np.array([r.rand_index for r in rs])
        secs = np.array([r.preprocess_seconds for r in rs])
        single = len(rs) == 1
        out.append({"method": m, "reps": len(rs),
                    "mean_rand_index": float(ri.mean()),
                    "std_rand_index": 0.0 if single else float(ri.std(ddof=1)),
                    "mean_preprocess_seconds": float(secs.mean()),
                    "std_preprocess_seconds": 0.0 if single else float(secs.std(ddof=1)),
                    "std_undefined": single})
    return out


def sweep(ds: Dataset, methods, cfg: PipelineConfig, axis: str, grid, reps: int, master: int,
          workers: int | None = None) -> list[dict]:
    if axis not in ("n", "d"):
        raise ConfigError("sweep axis must be 'n' or 'd'")
    rows = []
    for v in grid:
        v = int(v)
        if axis == "n" and not 1 <= v <= ds.N:
            raise InvalidSize(f"n={v} outside [1, {ds.N}]")
        c = replace(cfg, **{axis: v})
        for s in summarize(bench(ds, methods, c, reps, master, workers)):
            rows.append({"axis": axis, "value": v, "method": s["method"],
                         "mean_rand_index": s["mean_rand_index"], "std_rand_index": s["std_rand_index"]})
    return rows


def synth_source(spec: SynthSpec):
    """Turn a synthetic spec into a fresh-sample source ``f(count, generator)``."""
    def draw(count: int, gen: np.random.Generator) -> np.ndarray:
        s = replace(spec, N=max(count, 2), seed=int(gen.integers(2**62)))
        return generate(s).features[:count]
    return draw
