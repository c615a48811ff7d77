"""Benchmark the compiled coordinate-descent kernel against the numpy
fallback, on the raw sweep and on full fits.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np
from scipy import sparse
from scipy.special import expit

from textlogit._kernels import available_backends
from textlogit.penalty import ScadParams
from textlogit.solver import FitOptions, fit


def sweep_problem(n, p, density, seed=0):
    rng = np.random.default_rng(seed)
    X = sparse.random(n, p, density=density, random_state=seed, format="csc")
    X.data = np.abs(X.data)
    y = rng.binomial(1, 0.5, n).astype(np.float64)
    beta = np.zeros(p)
    pi = np.full(n, 0.5)
    w = pi * (1 - pi)
    r = (y - pi) / w
    sq = X.copy()
    sq.data = sq.data**2
    v = np.asarray(sq.T @ w).ravel() / n
    return X, w, r, beta, v


def time_sweeps(mod, X, w, r, beta, v, repeats):
    data = np.ascontiguousarray(X.data)
    indices = np.ascontiguousarray(X.indices, dtype=np.int32)
    indptr = np.ascontiguousarray(X.indptr, dtype=np.int32)
    cols = np.arange(X.shape[1], dtype=np.int32)
    intercept = np.array([0.0])
    best = np.inf
    for _ in range(repeats):
        b = beta.copy()
        rr = r.copy()
        start = time.perf_counter()
        mod.cd_sweep(
            data, indices, indptr, X.shape[0], w, rr, b, intercept, v,
            float(w.mean()), 0.01, 3.7, True, True, np.inf, cols,
        )
        best = min(best, time.perf_counter() - start)
    return best


def time_fit(n, p, seed, backend_env):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:5] = 2.0
    y = rng.binomial(1, expit(X @ beta))
    start = time.perf_counter()
    fit(X, y, ScadParams(lam=0.05, gamma=3.7), FitOptions(fit_intercept=False))
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller problems")
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled kernel not built; run `pip install -e .` with a compiler")

    shapes = [(2000, 10000, 0.02), (500, 2000, 0.05)] if not args.quick else [
        (500, 2000, 0.05)
    ]
    repeats = 5
    print(f"\n{'problem':>24}  " + "  ".join(f"{name:>10}" for name in backends))
    for n, p, density in shapes:
        X, w, r, beta, v = sweep_problem(n, p, density)
        times = {
            name: time_sweeps(mod, X, w, r, beta, v, repeats)
            for name, mod in backends.items()
        }
        label = f"sweep {n}x{p} d={density}"
        row = "  ".join(f"{times[name]*1e3:9.2f}ms" for name in backends)
        print(f"{label:>24}  {row}")
        if "cython" in times and times["cython"] > 0:
            print(f"{'':>24}  speedup x{times['pure'] / times['cython']:.1f}")

    # full fits run whichever backend the package selected at import
    from textlogit._kernels import BACKEND

    n, p = (3200, 50) if not args.quick else (800, 50)
    elapsed = time_fit(n, p, 0, BACKEND)
    print(f"\nfull fit ({BACKEND}) n={n} p={p}: {elapsed*1e3:.1f}ms")
    print(
        "set TEXTLOGIT_PURE=1 and rerun to time the fallback end to end"
    )


if __name__ == "__main__":
    main()
