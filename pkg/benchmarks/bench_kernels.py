#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy backend.

Times the two hot propagation kernels on representative problem sizes:
the fixed-step RK4 integrator (many small-matrix products per call) and
the eigenbasis sandwich over a full time grid.  Run from the repository
root after building the extension:

    python benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np

from lindchain import _kernels_py

try:
    from lindchain import _kernels as _compiled
except ImportError:
    _compiled = None


def _bench(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_problems(L, n_steps, n_times, seed=11):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(L, L)) + 1j * rng.normal(size=(L, L))
    A = np.ascontiguousarray(A - 1.5 * np.eye(L))
    X0 = rng.normal(size=(L, L)) + 1j * rng.normal(size=(L, L))
    X0 = np.ascontiguousarray(0.5 * (X0 + X0.conj().T))
    Q = np.ascontiguousarray(0.1 * np.eye(L, dtype=complex))
    W = np.ascontiguousarray(rng.normal(size=(L, L))
                             + 1j * rng.normal(size=(L, L)))
    B0 = np.ascontiguousarray(rng.normal(size=(L, L))
                              + 1j * rng.normal(size=(L, L)))
    lam = np.ascontiguousarray(-rng.uniform(0.2, 1.0, L)
                               + 1j * rng.normal(size=L))
    times = np.linspace(0.0, 10.0, n_times)
    cases = {
        f"rk4_lindblad  L={L:3d} steps={n_steps}":
            lambda impl: impl.rk4_lindblad(A, Q, X0, 0.01, n_steps),
        f"sandwich_norms L={L:3d} times={n_times}":
            lambda impl: impl.sandwich_norms(W, B0, lam, times),
    }
    return cases


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats per case (best-of)")
    args = ap.parse_args()

    if _compiled is None:
        print("compiled extension not built; run "
              "'pip install -e . --no-build-isolation' first")

    print(f"{'case':42s} {'pure [ms]':>10s} {'compiled [ms]':>14s} "
          f"{'speedup':>8s}")
    for L, n_steps, n_times in [(8, 2000, 400), (40, 2000, 400),
                                (100, 500, 200)]:
        for name, call in make_problems(L, n_steps, n_times).items():
            t_py = _bench(lambda: call(_kernels_py), args.repeats)
            if _compiled is not None:
                t_c = _bench(lambda: call(_compiled), args.repeats)
                print(f"{name:42s} {1e3 * t_py:10.2f} {1e3 * t_c:14.2f} "
                      f"{t_py / t_c:7.1f}x")
            else:
                print(f"{name:42s} {1e3 * t_py:10.2f} {'-':>14s} {'-':>8s}")


if __name__ == "__main__":
    main()
