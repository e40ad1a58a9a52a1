#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 10000 100000 1000000]

Covers the four hot kernels: Dirichlet convolution, the exp/log coefficient
transforms, and batch evaluation of F(sigma+it) on a uniform node ladder.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from dsaddle._kernels import _pykernels

try:
    from dsaddle._kernels import _ckernels
except ImportError:
    _ckernels = None


def logn_array(N):
    out = np.zeros(N + 1)
    out[1:] = np.log(np.arange(1, N + 1, dtype=float))
    return out


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(N, eval_J):
    rng = np.random.default_rng(1)
    h = rng.uniform(-1, 1, N + 1)
    h[0] = 0.0
    f = np.abs(rng.normal(size=N + 1)) + 0.01
    f[0] = 0.0
    g = np.abs(rng.normal(size=N + 1))
    g[0] = 0.0
    logn = logn_array(N)
    evalN = min(N, 20_000)

    jobs = [
        ("conv", lambda m: m.conv(f, g, N)),
        ("exp_transform", lambda m: m.exp_transform(h, logn, N)),
        ("log_transform", lambda m: m.log_transform(f, logn, N)),
        ("eval_uniform", lambda m: m.eval_uniform(
            f[: evalN + 1], logn[: evalN + 1], 1.5, 0.0, 0.01, eval_J)),
    ]
    rows = []
    for name, job in jobs:
        tp = timeit(job, _pykernels)
        tc = timeit(job, _ckernels) if _ckernels else float("nan")
        rows.append((name, tp, tc))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--eval-nodes", type=int, default=4096)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("note: compiled backend not built (python setup.py build_ext --inplace)")
    header = f"{'kernel':>14s} {'N':>9s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for N in args.sizes:
        for name, tp, tc in bench(N, args.eval_nodes):
            speed = tp / tc if tc == tc and tc > 0 else float("nan")
            print(f"{name:>14s} {N:>9d} {tp:>9.4f}s {tc:>9.4f}s {speed:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
