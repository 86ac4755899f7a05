"""Clustering table: Rand index and preprocessing time of raw / Nystrom / KPCA / K-JL.

Usage:
    python3 scripts/table2.py --data data_banknote_authentication.txt --label-col -1
    python3 scripts/table2.py --synth gaussian_mixture --N 10000
"""
import argparse

from kernel_jl.data import SynthSpec, generate, load_csv, paper_n, standardize
from kernel_jl.experiments import METHODS, PipelineConfig, bench, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data")
    ap.add_argument("--label-col", default="-1")
    ap.add_argument("--synth", default="gaussian_mixture")
    ap.add_argument("--N", type=int, default=10_000)
    ap.add_argument("--reps", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-standardize", action="store_true")
    ap.add_argument("--kpca-mode", default="paper_literal", choices=("paper_literal", "unit_norm"))
    args = ap.parse_args()

    if args.data:
        ds = load_csv(args.data, label_col=args.label_col)
        if not args.no_standardize:
            ds = standardize(ds)
    else:
        ds = generate(SynthSpec(args.synth, args.N, seed=args.seed))
    k = ds.n_classes
    cfg = PipelineConfig(n=min(paper_n(ds.N), ds.N), d=10 * k, k=k, kpca_mode=args.kpca_mode)
    print(f"{ds.name}: N={ds.N} D={ds.D} k={k} n={cfg.n} d={cfg.d} reps={args.reps}")
    rows = summarize(bench(ds, METHODS, cfg, args.reps, args.seed))
    print(f"{'method':10s} {'time (s)':>18s} {'Rand index':>18s}")
    for r in rows:
        print(f"{r['method']:10s} {r['mean_preprocess_seconds']:8.4f} +- {r['std_preprocess_seconds']:.4f}"
              f" {r['mean_rand_index']:8.3f} +- {r['std_rand_index']:.3f}")


if __name__ == "__main__":
    main()
