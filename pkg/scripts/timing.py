"""Preprocessing wall time of K-JL against Nystrom, repetition by repetition."""
import argparse

import numpy as np

from kernel_jl.data import SynthSpec, generate
from kernel_jl.experiments import PipelineConfig, bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=10_000)
    ap.add_argument("--reps", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ds = generate(SynthSpec("gaussian_mixture", args.N, seed=args.seed))
    recs = bench(ds, ["nystrom", "kjl"], PipelineConfig(n=200, d=20, k=2), args.reps, args.seed, workers=1)
    ny = np.array([r.preprocess_seconds for r in recs if r.method == "nystrom"])
    kj = np.array([r.preprocess_seconds for r in recs if r.method == "kjl"])
    print(f"median ms: K-JL {np.median(kj) * 1e3:.2f}, Nystrom {np.median(ny) * 1e3:.2f}")
    print(f"K-JL no slower in {int(np.sum(kj <= ny))}/{args.reps} repetitions")


if __name__ == "__main__":
    main()
