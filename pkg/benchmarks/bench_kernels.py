"""Timing comparison of the compiled kernels against the pure fallback.

Run with `python3 benchmarks/bench_kernels.py`. Each kernel is timed on
the workload shape its callers use: Simpson sums over mid-size grids,
the damped scalar fixed point at fixed-point-solver tolerances, and the
tabulated-coefficient RK4 sweep behind the bid-function solver. Set
LIQSCREEN_PURE=1 to confirm the package itself runs on the fallback.
"""

import time

import numpy as np

from liqscreen import _kernels_py
from liqscreen.numerics import kernels


def _time(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_simpson(mod, n=513, loops=2000):
    ys = np.sin(np.linspace(0.0, 3.0, n))
    h = 3.0 / (n - 1)

    def run():
        for _ in range(loops):
            mod.simpson_sum(ys, h)

    return _time(run)


def bench_fixed_point(mod, loops=2000):
    def run():
        for _ in range(loops):
            mod.damped_affine_fp(0.3, 0.6, 0.5, 0.0, 1.0, 0.5, 1e-12, 10000)

    return _time(run)


def bench_rk4(mod, steps=2000, loops=50):
    ts = np.linspace(1.0, 0.0, 2 * steps + 1)
    k_half = -4.0 / (ts + 0.5)
    m_half = 0.5 * ts
    h = -1.0 / steps

    def run():
        for _ in range(loops):
            mod.rk4_affine(k_half, m_half, 1.0, h, steps)

    return _time(run)


def main():
    print(f"active backend: {'compiled' if kernels.IS_COMPILED else 'pure'}")
    rows = [
        ("simpson_sum 513pts x2000", bench_simpson),
        ("damped_affine_fp x2000", bench_fixed_point),
        ("rk4_affine 2000 steps x50", bench_rk4),
    ]
    print(f"{'kernel':<28}{'pure':>10}{'compiled':>10}{'speedup':>9}")
    for label, bench in rows:
        t_pure = bench(_kernels_py)
        if kernels.IS_COMPILED:
            t_fast = bench(kernels)
            print(f"{label:<28}{t_pure:>9.4f}s{t_fast:>9.4f}s"
                  f"{t_pure / t_fast:>8.1f}x")
        else:
            print(f"{label:<28}{t_pure:>9.4f}s{'n/a':>10}{'n/a':>9}")


if __name__ == "__main__":
    main()
