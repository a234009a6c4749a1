"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times coordinate descent (the inner loop of the bang-bang search) and the
piecewise-constant propagation with Jacobian (the inner loop of shooting).
"""
import argparse
import time

import numpy as np

from chatterlab import _kernels_py

try:
    from chatterlab import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def descent_case(mod):
    # (x0, y0, s_f, x1, y1, s_b, active_f, active_b)
    p = np.array([1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 1.0, 0.0])
    d0 = np.array([0.9, 1.1, 0.3, 0.1, 0.05, 0.02])
    weights = np.array([1e2, 1e3, 1e4, 1e5, 1e6])
    return lambda: mod.coordinate_descent(p, d0, 6, 4.0, weights, 6, 30, 1.0)


def propagate_case(mod):
    rng = np.random.default_rng(0)
    n = 64
    us = rng.uniform(-1, 1, n)
    vs = rng.uniform(-1, 1, n)
    state = np.array([1.0, 0.0, 0.0, 0.0])
    return lambda: [mod.propagate_uv(state, us, vs, 4.0 / n, True) for _ in range(50)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; only the fallback can be timed")
    cases = [("coordinate_descent", descent_case), ("propagate_uv x50", propagate_case)]
    print(f"{'kernel':<22}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, make in cases:
        t_py = _best_of(make(_kernels_py), args.repeat)
        if _kernels is None:
            print(f"{name:<22}{t_py:>12.4g}{'-':>12}{'-':>10}")
            continue
        t_cy = _best_of(make(_kernels), args.repeat)
        print(f"{name:<22}{t_py:>12.4g}{t_cy:>12.4g}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
