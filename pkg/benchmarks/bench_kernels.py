#!/usr/bin/env python3
"""Benchmark the numba and numpy quadrature kernels against each other.

Times the weight-grid evaluation and one full orthogonality integral on
the d = 2 default setup for both backends.  The numba path is warmed
before timing so compilation is excluded.

Run:  python benchmarks/bench_kernels.py [--m 128] [--repeat 5]
"""

import argparse
import time

import numpy as np

from awbispec import gridkernels
from awbispec.awcore import mv_poly_symbolic
from awbispec.quadrature import QuadratureGrid, inner_product, xpoly_evaluator
from awbispec.verify import default_params


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=128, help="grid points per dimension")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    params = default_params(2)
    grid = QuadratureGrid(2, args.m)
    alphas = np.array([float(a) for a in params.alpha])
    q = float(params.q)

    paths = {"numpy": gridkernels.weight_grid_numpy}
    if gridkernels.backend_name() == "numba":
        paths["numba"] = gridkernels.weight_grid
        gridkernels.weight_grid(grid.thetas, alphas, q, 1e-16)  # warm the jit

    print(f"active backend: {gridkernels.backend_name()}")
    print(f"grid: d=2, m={args.m} ({grid.npoints} points)\n")
    print(f"{'kernel':<22}{'backend':<10}{'best time':>12}")

    results = {}
    for name, fn in paths.items():
        dt = timeit(lambda: fn(grid.thetas, alphas, q, 1e-16), args.repeat)
        results[name] = dt
        print(f"{'weight grid':<22}{name:<10}{dt * 1e3:>10.2f}ms")

    pn = xpoly_evaluator(mv_poly_symbolic(params, (1, 1)))
    weights = gridkernels.weight_grid_numpy(grid.thetas, alphas, q, 1e-16)
    dt = timeit(
        lambda: inner_product(params, pn, pn, grid, weights=weights), args.repeat
    )
    print(f"{'inner product <P,P>':<22}{'active':<10}{dt * 1e3:>10.2f}ms")

    if len(results) == 2:
        ratio = results["numpy"] / results["numba"]
        print(f"\nnumba speedup over numpy on the weight grid: {ratio:.2f}x")


if __name__ == "__main__":
    main()
