"""Rand index against projection dimension d (n fixed) and subsample size n (d fixed)."""
import argparse
from pathlib import Path

from kernel_jl.cli import write_rows
from kernel_jl.data import SynthSpec, generate
from kernel_jl.experiments import PipelineConfig, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--synth", default="crescent_full_moon")
    ap.add_argument("--N", type=int, default=5000)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--out", default="figure2")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ds = generate(SynthSpec(args.synth, args.N))
    methods = ("nystrom", "kpca", "kjl")
    header = ["axis", "value", "method", "mean_rand_index", "std_rand_index"]
    for axis, grid, cfg in (("d", [2, 5, 10, 20, 50], PipelineConfig(n=200, d=10, k=2)),
                            ("n", [50, 100, 200, 400, 800], PipelineConfig(n=200, d=10, k=2))):
        rows = sweep(ds, methods, cfg, axis, grid, args.reps, master=0)
        write_rows(out / f"sweep_{axis}.csv", header, rows)
        for r in rows:
            print(f"{axis}={r['value']:<4d} {r['method']:8s} RI {r['mean_rand_index']:.3f} "
                  f"+- {r['std_rand_index']:.3f}")


if __name__ == "__main__":
    main()
