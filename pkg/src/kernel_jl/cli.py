"""Command-line entry point: ``kjl {synth,embed,bench,sweep,theory}``.

Options may also come from a ``key = value`` file given with ``--config``;
command-line flags override it. Exit codes: 0 success, 1 other failure,
2 configuration, 3 I/O, 4 parse, 5 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments, theory
from .data import SHAPES, Dataset, SynthSpec, generate, load_csv, paper_n, save_csv, standardize
from .errors import ConfigError, IoError, KernelJLError, OracleTooSmall
from .experiments import METHODS, BenchRecord, PipelineConfig
from .kernel import KernelSpec, gram, select_bandwidth
from .linalg import SeededRng, derive_seed
from .persist import save_projector

log = logging.getLogger("kernel_jl")


def read_config_file(path) -> dict:
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def write_kv(path, mapping: dict) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for k, v in mapping.items():
            fh.write(f"{k}={v}\n")


def _fmt(v):
    return format(v, ".17g") if isinstance(v, float) else str(v)


def write_rows(path, header, rows) -> None:
    try:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(r[h]) for h in header])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _grid(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _add_common(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--data", help="CSV data file")
    p.add_argument("--label-col", default=None, help="label column index (negative ok) or header name")
    p.add_argument("--header", action="store_true", help="CSV has a header row")
    p.add_argument("--synth", choices=SHAPES, help="use a synthetic data set instead of --data")
    p.add_argument("--N", type=int, default=5000, help="synthetic data size")
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                   help="z-score features (default: on for CSV, off for synthetic)")
    p.add_argument("--out", default=".", help="output directory")


def _add_pipeline(p, method_default):
    p.add_argument("--method", default=method_default,
                   help=f"one of {', '.join(METHODS)}; bench/sweep accept a comma list or 'all'")
    p.add_argument("--n", type=int, default=None, help="subsample size (default max(200, N/100))")
    p.add_argument("--d", type=int, default=None, help="projection dimension (default 10k)")
    p.add_argument("--k", type=int, default=None, help="clusters (default: number of label classes)")
    p.add_argument("--percentile", type=float, default=25.0)
    p.add_argument("--bandwidth-scope", choices=("subsample", "full"), default="subsample")
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--center-oos", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--kpca-mode", choices=("paper_literal", "unit_norm"), default="paper_literal")
    p.add_argument("--pairing", action=argparse.BooleanOptionalAction, default=True,
                   help="share the subsample across methods within a repetition")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=300)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kjl", description="Kernel JL projections and benchmarks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic data set to CSV")
    _add_common(p)

    p = sub.add_parser("embed", help="project a data set and write the embedding")
    _add_common(p)
    _add_pipeline(p, "kjl")
    p.add_argument("--save-projector", help="also write the fitted projector (.npz)")

    p = sub.add_parser("bench", help="Rand index and preprocessing time over repetitions")
    _add_common(p)
    _add_pipeline(p, "all")
    p.add_argument("--reps", type=int, default=30)

    p = sub.add_parser("sweep", help="mean Rand index over an n or d grid")
    _add_common(p)
    _add_pipeline(p, "all")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--axis", choices=("n", "d"), required=False, default="d")
    p.add_argument("--grid", type=_grid, default=[2, 5, 10, 20, 50])

    p = sub.add_parser("theory", help="convergence-rate and distribution checks")
    _add_common(p)
    p.add_argument("--m", type=int, default=2000, help="reference sample size")
    p.add_argument("--probes", type=int, default=50)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--d-grid", type=_grid, default=[10, 30, 100, 300, 1000])
    p.add_argument("--n-grid", type=_grid, default=[10, 20, 50, 100, 200])
    p.add_argument("--d-fixed", type=int, default=500, help="d used along the n axis")
    p.add_argument("--percentile", type=float, default=25.0)
    p.add_argument("--ks-runs", type=int, default=100)
    p.add_argument("--ks-draws", type=int, default=10_000)
    p.add_argument("--ks-n", type=int, default=50)
    p.add_argument("--ks-d", type=int, default=10)
    p.add_argument("--var-reps", type=int, default=50, help="subsamples per n in the variance sweep")
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config_file(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        for key, value in cfg.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            action = known[key]
            if isinstance(action, argparse.BooleanOptionalAction) or action.const is True:
                value = _bool(value)
            elif action.type is not None:
                value = action.type(value)
            sub.set_defaults(**{key: value})
        args = parser.parse_args(argv)  # flags override file defaults
    return args


def load_dataset(args) -> Dataset:
    if args.synth and args.data:
        raise ConfigError("give either --data or --synth, not both")
    if args.synth:
        ds = generate(SynthSpec(args.synth, args.N, seed=args.seed, noise=args.noise))
        std = bool(args.standardize)
    elif args.data:
        if not Path(args.data).is_file():
            raise IoError(f"data file not found: {args.data}")
        ds = load_csv(args.data, args.label_col, args.header)
        std = args.standardize is None or args.standardize
    else:
        raise ConfigError("one of --data or --synth is required")
    return standardize(ds) if std else ds


def _methods(text) -> list[str]:
    if text == "all":
        return list(METHODS)
    ms = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in ms if m not in METHODS]
    if bad or not ms:
        raise ConfigError(f"unknown method(s) {bad}; choose from {METHODS}")
    return ms


def pipeline_config(args, ds: Dataset) -> PipelineConfig:
    k = args.k if args.k is not None else (ds.n_classes or 2)
    n = args.n if args.n is not None else min(paper_n(ds.N), ds.N)
    d = args.d if args.d is not None else 10 * k
    if min(n, d, k) < 1:
        raise ConfigError("n, d and k must all be >= 1")
    return PipelineConfig(n=n, d=d, k=k, percentile=args.percentile, centered=args.center,
                          center_oos=args.center_oos, kpca_mode=args.kpca_mode,
                          bandwidth_scope=args.bandwidth_scope, paired=args.pairing,
                          restarts=args.restarts, max_iter=args.max_iter)


def _outdir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out}: {exc}") from exc
    return out


def cmd_synth(args) -> None:
    ds = load_dataset(args)
    out = _outdir(args)
    D = ds.D
    save_csv(out / f"{ds.name}.csv", ds.features, ds.labels, [f"x{j}" for j in range(D)] + ["label"])


def cmd_embed(args) -> None:
    ds = load_dataset(args)
    (method,) = _methods(args.method)
    cfg = pipeline_config(args, ds)
    out = _outdir(args)
    sub_seed, proj_seed, _ = experiments.rep_seeds(args.seed, 0, method, cfg.paired)
    proj = experiments.project(ds, method, cfg, sub_seed, proj_seed)
    dim = proj.points.shape[1]
    save_csv(out / "embedding.csv", proj.points, ds.labels,
             [f"z{j}" for j in range(dim)] + (["label"] if ds.labels is not None else []))
    meta = {"method": method, "seed": args.seed, "projection_seed": proj_seed,
            "n": cfg.n if method != "raw" else ds.N, "d": dim, "N": ds.N,
            "bandwidth_sq": _fmt(proj.bandwidth_sq) if proj.bandwidth_sq is not None else "NA",
            "centered": cfg.centered if method == "kjl" else method == "kpca",
            "preprocess_seconds": _fmt(proj.seconds)}
    write_kv(out / "embedding.meta", meta)
    if args.save_projector and method != "raw":
        _save_fitted(args, ds, method, cfg, sub_seed, proj_seed)


def _save_fitted(args, ds, method, cfg, sub_seed, proj_seed):
    from . import baselines, sketch
    from .data import subsample

    pts, _ = subsample(ds, cfg.n, sub_seed)
    spec = experiments.bandwidth(ds, pts, cfg, sub_seed)
    if method == "kjl":
        proj = sketch.fit(pts, spec, cfg.d, proj_seed, cfg.centered, cfg.center_oos)
    elif method == "kpca":
        proj = baselines.kpca_fit(pts, spec, cfg.d, cfg.kpca_mode)
    else:
        proj = baselines.nystrom_fit(pts, spec, cfg.d)
    save_projector(proj, args.save_projector)


def cmd_bench(args) -> None:
    ds = load_dataset(args)
    if ds.labels is None:
        raise ConfigError("bench needs labels (--label-col for CSV data)")
    cfg = pipeline_config(args, ds)
    methods = _methods(args.method)
    out = _outdir(args)
    t0 = time.perf_counter()
    records = experiments.bench(ds, methods, cfg, args.reps, args.seed)
    write_rows(out / "bench.csv", BenchRecord.FIELDS, [asdict(r) for r in records])
    summary = experiments.summarize(records)
    write_rows(out / "bench_summary.csv", list(summary[0].keys()), summary)
    for s in summary:
        flag = " (single rep)" if s["std_undefined"] else ""
        print(f"{s['method']:8s} RI {s['mean_rand_index']:.3f} +- {s['std_rand_index']:.3f}{flag}  "
              f"time {s['mean_preprocess_seconds']:.4f}s")
    log.info("bench finished in %.1fs", time.perf_counter() - t0)


def cmd_sweep(args) -> None:
    ds = load_dataset(args)
    if ds.labels is None:
        raise ConfigError("sweep needs labels (--label-col for CSV data)")
    cfg = pipeline_config(args, ds)
    rows = experiments.sweep(ds, _methods(args.method), cfg, args.axis, args.grid, args.reps, args.seed)
    write_rows(_outdir(args) / f"sweep_{args.axis}.csv",
               ["axis", "value", "method", "mean_rand_index", "std_rand_index"], rows)


def cmd_theory(args) -> None:
    if args.data:
        raise ConfigError("theory runs on synthetic sources only; use --synth")
    spec = SynthSpec(args.synth or "gaussian_mixture", max(args.m, 2), seed=args.seed, noise=args.noise)
    spec.validate()
    if args.n_grid and args.n_grid[-1] > args.m // 10:
        raise OracleTooSmall(f"largest n={args.n_grid[-1]} exceeds m/10={args.m // 10}")
    source = experiments.synth_source(spec)
    out = _outdir(args)
    ref = source(args.m, SeededRng(derive_seed(args.seed, 7)).generator())
    kspec = KernelSpec.from_sigma(select_bandwidth(ref, args.percentile))
    oracle = theory.fit_oracle(ref, kspec)

    rd = theory.rate_experiment(source, oracle, "d", args.d_grid, args.m, args.reps, args.probes, args.seed)
    theory.write_report_csv(rd, out / "rate_d.csv")
    rn = theory.rate_experiment(source, oracle, "n", args.n_grid, args.d_fixed, args.reps, args.probes,
                                args.seed)
    theory.write_report_csv(rn, out / "rate_n.csv")

    f_point = ref[0]
    alpha = np.ones(args.ks_d) / np.sqrt(args.ks_d)
    mc_n = args.ks_n if args.ks_n in args.n_grid else None
    var = theory.variance_convergence(oracle, f_point, alpha, args.n_grid, args.var_reps, args.seed, source,
                                      mc_draws=args.ks_draws, mc_n=mc_n)
    theory.write_report_csv(var, out / "variance_n.csv")

    sub = source(args.ks_n, SeededRng(derive_seed(args.seed, 8)).generator())
    x = source(1, SeededRng(derive_seed(args.seed, 9)).generator())[0]
    rows = []
    for run in range(args.ks_runs):
        r = theory.distribution_check(sub, kspec, x, args.ks_d, args.ks_draws, derive_seed(args.seed, 10, run))
        rows.append({"run": run, "ks_statistic": r.ks_statistic, "p_value": r.p_value, "passed": r.passed,
                     "target_var": r.target_var, "sample_var": r.sample_var, "var_z": r.var_z})
    write_rows(out / "distribution.csv", list(rows[0].keys()), rows)

    eff = []
    for n in sorted(set(args.n_grid + [args.m])):
        g = gram(kspec, ref[:n])
        eff.append({"n": n, "effective_dimension": theory.effective_dimension(g),
                    "effective_dimension_cubed": theory.effective_dimension_cubed(g)})
    write_rows(out / "effective_dimension.csv", ["n", "effective_dimension", "effective_dimension_cubed"], eff)

    passes = sum(r["passed"] for r in rows)
    print(f"rate vs d: slope {rd.slope:.3f}; rate vs n: slope {rn.slope:.3f}; "
          f"variance gap slope {var.slope:.3f} (MC z {var.extra.get('mc_z', float('nan')):.2f}); "
          f"KS passes {passes}/{len(rows)}")


COMMANDS = {"synth": cmd_synth, "embed": cmd_embed, "bench": cmd_bench, "sweep": cmd_sweep,
            "theory": cmd_theory}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except KernelJLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
