#!/usr/bin/env python3
"""Benchmark the jit kernels against the pure-numpy fallback.

Runs the Green-function table and the RK4 mode oracle through both backends
on identical inputs and reports timings plus the largest cross-backend
deviation.  The numpy path is what you get with OLDROYD2D_PURE_NUMPY=1.
"""

import time

import numpy as np

from oldroyd2d import kernels


def _timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_green(n_points=200_000, t=7.5):
    xi = np.linspace(0.0, 2.0, n_points)
    args = (1.0, 1.0, 1.0, 0.01, xi, t)
    if kernels._HAVE_NUMBA:
        kernels._green_numba(*args)  # compile outside the timing loop
        t_jit, out_jit = _timeit(lambda: kernels._green_numba(*args))
    else:
        t_jit, out_jit = float("nan"), None
    t_np, out_np = _timeit(lambda: kernels._green_numpy(*args))
    dev = (
        max(float(np.max(np.abs(a - b))) for a, b in zip(out_jit, out_np))
        if out_jit is not None
        else float("nan")
    )
    return t_jit, t_np, dev


def bench_rk4(n_modes=2_000, t=5.0, n_steps=2_000):
    xi = np.linspace(0.0, 1.0, n_modes)
    u0 = np.ones(n_modes, dtype=np.complex128)
    s0 = 0.5j * np.ones(n_modes, dtype=np.complex128)
    args = (1.0, 1.0, 1.0, 0.0, xi, u0, s0, t, n_steps)
    if kernels._HAVE_NUMBA:
        kernels._rk4_numba(*args)
        t_jit, out_jit = _timeit(lambda: kernels._rk4_numba(*args), repeats=3)
    else:
        t_jit, out_jit = float("nan"), None
    t_np, out_np = _timeit(lambda: kernels._rk4_numpy(*args), repeats=3)
    dev = (
        max(float(np.max(np.abs(a - b))) for a, b in zip(out_jit, out_np))
        if out_jit is not None
        else float("nan")
    )
    return t_jit, t_np, dev


def main():
    print(f"active backend: {kernels.backend()}")
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>9}{'max dev':>12}")
    for name, fn in (("green_table 200k pts", bench_green), ("rk4_evolve 2k x 2k", bench_rk4)):
        t_jit, t_np, dev = fn()
        speed = t_np / t_jit if t_jit == t_jit else float("nan")
        print(f"{name:<22}{t_jit * 1e3:>12.2f}{t_np * 1e3:>12.2f}{speed:>9.2f}{dev:>12.2e}")


if __name__ == "__main__":
    main()
