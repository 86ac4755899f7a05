"""Kernel Johnson-Lindenstrauss projections, baselines and validation experiments."""
from .baselines import (kpca_fit, kpca_transform, kpca_transform_batch, nystrom_fit, nystrom_transform,
                        nystrom_transform_batch)
from .clustering import Partition, kmeans, rand_index
from .data import Dataset, SynthSpec, generate, load_csv, paper_n, save_csv, standardize, subsample
from .kernel import KernelSpec, center_cross, center_gram, cross_gram, gram, kernel_eval, select_bandwidth
from .linalg import SeededRng, SymMatrix, gaussian_matrix, rank_d_pinv, sym_eigen
from .sketch import Embedding, SketchProjector, fit, sample_vhat, sketch_inner, transform, transform_batch

__all__ = [
    "Dataset", "Embedding", "KernelSpec", "Partition", "SeededRng", "SketchProjector", "SymMatrix",
    "SynthSpec", "center_cross", "center_gram", "cross_gram", "fit", "gaussian_matrix", "generate", "gram",
    "kernel_eval", "kmeans", "kpca_fit", "kpca_transform", "kpca_transform_batch", "load_csv",
    "nystrom_fit", "nystrom_transform", "nystrom_transform_batch", "paper_n", "rand_index", "rank_d_pinv",
    "sample_vhat", "save_csv", "select_bandwidth", "sketch_inner", "standardize", "subsample", "sym_eigen",
    "transform", "transform_batch",
]
__version__ = "0.1.0"
