"""Synthetic generators, CSV ingestion, standardisation and subsampling."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyData, InvalidSize, InvalidSpec, IoError, ParseError
from .linalg import SeededRng

log = logging.getLogger(__name__)

SUBSAMPLE_STREAM = 2
SHAPES = ("cluster_in_cluster", "crescent_full_moon", "gaussian_mixture")


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""
    constant_features: tuple = ()

    def __post_init__(self):
        f = self.features
        if f.ndim != 2:
            raise ParseError(f"features must be 2-D, got shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise ParseError("features contain non-finite values")
        if self.labels is not None and len(self.labels) != f.shape[0]:
            raise ParseError(f"{len(self.labels)} labels for {f.shape[0]} rows")

    @property
    def N(self) -> int:
        return self.features.shape[0]

    @property
    def D(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return 0 if self.labels is None else int(np.unique(self.labels).size)


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of a synthetic two-dimensional (or mixture) data set.

    Geometry defaults: cluster-in-cluster uses an inner disc of radius
    ``r1`` inside an annulus ``[r2, r3]``; the crescent set is a unit disc
    with an arc band of radius ``crescent_radius`` spanning
    ``crescent_span_deg`` degrees.
    """

    shape: str
    N: int
    seed: int = 0
    noise: float = 0.2
    r1: float = 1.0
    r2: float = 2.5
    r3: float = 3.5
    moon_radius: float = 1.0
    crescent_radius: float = 3.0
    crescent_span_deg: float = 220.0
    crescent_width: float = 0.5
    means: tuple = ((0.0, 0.0), (3.0, 0.0))
    sigma: float = 1.0
    weights: tuple = (0.5, 0.5)

    def validate(self):
        if self.shape not in SHAPES:
            raise InvalidSpec(f"unknown synthetic shape {self.shape!r}")
        if self.N < 2:
            raise InvalidSpec("N must be >= 2")
        if self.noise < 0:
            raise InvalidSpec("noise must be non-negative")
        if self.shape == "cluster_in_cluster" and not (0 < self.r1 < self.r2 < self.r3):
            raise InvalidSpec(f"need 0 < r1 < r2 < r3, got {(self.r1, self.r2, self.r3)}")
        if self.shape == "crescent_full_moon":
            inner = self.crescent_radius - self.crescent_width / 2
            if not (0 < self.moon_radius < inner) or not 0 < self.crescent_span_deg <= 360:
                raise InvalidSpec("crescent band must lie outside the moon disc")
        if self.shape == "gaussian_mixture":
            w = np.asarray(self.weights, dtype=float)
            if len(self.means) != len(w) or np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
                raise InvalidSpec("mixture weights must be non-negative, sum to 1, one per mean")
            if self.sigma <= 0:
                raise InvalidSpec("mixture sigma must be positive")


def class_counts(N: int, weights) -> np.ndarray:
    """Largest-remainder apportionment of N points to the given proportions."""
    w = np.asarray(weights, dtype=float)
    raw = N * w
    counts = np.floor(raw).astype(int)
    rest = N - counts.sum()
    counts[np.argsort(-(raw - counts), kind="stable")[:rest]] += 1
    return counts


def _polar(r, theta):
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def _radial_noise(gen, size, scale, bound):
    return np.clip(gen.normal(0.0, scale, size), -bound, bound) if scale > 0 else np.zeros(size)


def generate(spec: SynthSpec) -> Dataset:
    spec.validate()
    gen = SeededRng(spec.seed, 0).generator()
    if spec.shape == "cluster_in_cluster":
        n0, n1 = class_counts(spec.N, (0.5, 0.5))
        # noise is truncated to keep the disc and annulus disjoint
        bound = 0.49 * (spec.r2 - spec.r1)
        r_in = np.abs(spec.r1 * np.sqrt(gen.random(n0)) + _radial_noise(gen, n0, spec.noise, bound))
        r_out = gen.uniform(spec.r2, spec.r3, n1) + _radial_noise(gen, n1, spec.noise, bound)
        x = np.vstack([_polar(r_in, gen.uniform(0, 2 * np.pi, n0)),
                       _polar(r_out, gen.uniform(0, 2 * np.pi, n1))])
        y = np.repeat([0, 1], [n0, n1])
    elif spec.shape == "crescent_full_moon":
        n0, n1 = class_counts(spec.N, (0.5, 0.5))
        gap = spec.crescent_radius - spec.crescent_width / 2 - spec.moon_radius
        bound = 0.49 * gap
        r_in = np.abs(spec.moon_radius * np.sqrt(gen.random(n0)) + _radial_noise(gen, n0, spec.noise, bound))
        half = np.deg2rad(spec.crescent_span_deg) / 2
        theta = np.pi / 2 + gen.uniform(-half, half, n1)
        w = spec.crescent_width / 2
        r_out = spec.crescent_radius + gen.uniform(-w, w, n1) + _radial_noise(gen, n1, spec.noise, bound)
        x = np.vstack([_polar(r_in, gen.uniform(0, 2 * np.pi, n0)), _polar(r_out, theta)])
        y = np.repeat([0, 1], [n0, n1])
    else:
        means = np.asarray(spec.means, dtype=float)
        counts = class_counts(spec.N, spec.weights)
        y = np.repeat(np.arange(len(counts)), counts)
        x = means[y] + spec.sigma * gen.standard_normal((spec.N, means.shape[1]))
    perm = gen.permutation(spec.N)
    return Dataset(x[perm], y[perm].astype(np.int64), spec.shape)


def _sniff_delimiter(line: str) -> str:
    return ";" if line.count(";") > line.count(",") else ","


def load_csv(path, label_col=None, has_header: bool = False, name: str | None = None) -> Dataset:
    """Read a numeric CSV; ``label_col`` is a column index (negative allowed) or header name.

    String labels become dense integer ids in order of first appearance.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    first = next((ln for ln in lines if ln.strip()), None)
    if first is None:
        raise EmptyData(f"{path} is empty")
    reader = csv.reader(lines, delimiter=_sniff_delimiter(first))
    rows = [(i + 1, r) for i, r in enumerate(reader) if any(c.strip() for c in r)]
    header = None
    if has_header:
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise EmptyData(f"{path} has no data rows")
    width = len(rows[0][1])
    for lineno, r in rows:
        if len(r) != width:
            raise ParseError(f"line {lineno}: expected {width} fields, got {len(r)}", line=lineno)
    lab = None
    if label_col is not None:
        if isinstance(label_col, str) and not label_col.lstrip("-").isdigit():
            if header is None or label_col not in header:
                raise ParseError(f"label column {label_col!r} not found in header")
            lab = header.index(label_col)
        else:
            lab = int(label_col)
            if not -width <= lab < width:
                raise ParseError(f"label column {lab} out of range for {width} columns")
            lab %= width
    feat_cols = [c for c in range(width) if c != lab]
    feats = np.empty((len(rows), len(feat_cols)))
    for i, (lineno, r) in enumerate(rows):
        for j, c in enumerate(feat_cols):
            try:
                feats[i, j] = float(r[c])
            except ValueError:
                raise ParseError(f"line {lineno}, column {c + 1}: non-numeric value {r[c]!r}",
                                 line=lineno, col=c + 1) from None
    labels = None
    if lab is not None:
        ids: dict = {}
        labels = np.array([ids.setdefault(r[lab].strip(), len(ids)) for _, r in rows], dtype=np.int64)
    return Dataset(feats, labels, name or path.stem)


def save_csv(path, features, labels=None, header=None) -> None:
    """Write features (and an optional trailing label column) with 17 significant digits."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if header is not None:
                w.writerow(header)
            for i, row in enumerate(features):
                cells = [format(v, ".17g") for v in row]
                if labels is not None:
                    cells.append(str(labels[i]))
                w.writerow(cells)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def standardize(ds: Dataset) -> Dataset:
    """Per-feature z-score with the population std; constant features pass through."""
    x = ds.features
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    const = tuple(int(j) for j in np.flatnonzero(sd == 0))
    if const:
        log.warning("standardize: features %s have zero variance and are left unchanged", const)
    safe = np.where(sd == 0, 1.0, sd)
    out = np.where(sd == 0, x, (x - mu) / safe)
    return Dataset(out, ds.labels, ds.name, const)


def paper_n(N: int) -> int:
    """Subsample size max(200, N/100), rounded half up."""
    return max(200, int(math.floor(N / 100 + 0.5)))


def subsample(ds, n: int, seed: int):
    """Uniform subsample without replacement; returns ``(points, indices)``."""
    x = ds.features if isinstance(ds, Dataset) else np.asarray(ds, dtype=float)
    N = x.shape[0]
    if not 1 <= n <= N:
        raise InvalidSize(f"subsample size {n} outside [1, {N}]")
    idx = SeededRng(seed, SUBSAMPLE_STREAM).generator().choice(N, size=n, replace=False)
    return x[idx], idx
