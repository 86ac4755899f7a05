"""Convergence experiments: sketch error rates in d and n, variance gap and KS checks.

Thin wrapper over ``kjl theory`` with the default protocol (m=2000 reference
points, 50 probe pairs, 20 repetitions).
"""
import sys

from kernel_jl.cli import main

if __name__ == "__main__":
    sys.exit(main(["theory", "--out", "theory_out", *sys.argv[1:]]))
