"""Projector serialisation as version-tagged ``.npz`` containers.

Arrays are stored as raw float64, so a save/load round trip is bit-exact.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .baselines import KpcaProjector, NystromProjector
from .errors import IoError, ParseError
from .kernel import GramMatrix, KernelSpec
from .linalg import SymMatrix
from .sketch import SketchProjector

FORMAT_VERSION = 1


def save_projector(proj, path) -> None:
    if isinstance(proj, SketchProjector):
        g = proj.gram
        payload = dict(method="kjl", n=proj.n, d=proj.d, seed=proj.seed, centered=proj.centered,
                       center_oos=proj.center_oos, sketch=proj.sketch, gram=g.matrix,
                       row_means=g.row_means if g.centered else np.empty(0),
                       grand_mean=g.grand_mean if g.centered else np.nan)
    elif isinstance(proj, KpcaProjector):
        g = proj.gram
        payload = dict(method="kpca", mode=proj.mode, eigenvalues=proj.eigenvalues,
                       eigenvectors=proj.eigenvectors, gram=g.matrix, row_means=g.row_means,
                       grand_mean=g.grand_mean)
    elif isinstance(proj, NystromProjector):
        payload = dict(method="nystrom", eigenvalues=proj.eigenvalues, eigenvectors=proj.eigenvectors,
                       weights=proj.weights)
    else:
        raise TypeError(f"cannot serialise {type(proj).__name__}")
    payload.update(version=FORMAT_VERSION, bandwidth_sq=proj.spec.bandwidth_sq, subsample=proj.subsample)
    try:
        with Path(path).open("wb") as fh:
            np.savez(fh, **payload)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


def load_projector(path):
    try:
        z = np.load(Path(path), allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise IoError(f"cannot read projector {path}: {exc}") from exc
    with z:
        version = int(z["version"])
        if version != FORMAT_VERSION:
            raise ParseError(f"unsupported projector format version {version}")
        method = str(z["method"])
        spec = KernelSpec(float(z["bandwidth_sq"]))
        sub = _frozen(z["subsample"])
        if method == "kjl":
            centered = bool(z["centered"])
            g = GramMatrix(SymMatrix(z["gram"], check=False), centered,
                           _frozen(z["row_means"]) if centered else None,
                           float(z["grand_mean"]) if centered else None)
            return SketchProjector(sub, spec, centered, g, _frozen(z["sketch"]), int(z["seed"]),
                                   bool(z["center_oos"]))
        if method == "kpca":
            g = GramMatrix(SymMatrix(z["gram"], check=False), True, _frozen(z["row_means"]),
                           float(z["grand_mean"]))
            return KpcaProjector(sub, spec, g, _frozen(z["eigenvalues"]), _frozen(z["eigenvectors"]),
                                 str(z["mode"]))
        if method == "nystrom":
            return NystromProjector(sub, spec, _frozen(z["eigenvalues"]), _frozen(z["eigenvectors"]),
                                    _frozen(z["weights"]))
    raise ParseError(f"unknown projector method {method!r}")
