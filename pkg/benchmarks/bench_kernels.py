"""Time the stochastic geodesic-descent kernel on both backends.

The compiled kernel removes the per-step Python and numpy dispatch
overhead that dominates when d and m are small and the step count is
large (the regime the default schedule T = min(n^2, 200n) puts us in).

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from gdppca import _kernels_py

try:
    from gdppca import _kernels
except ImportError:
    _kernels = None


def bench(mod, z, v0, idx, noise, etas, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        v = v0.copy()
        t0 = time.perf_counter()
        mod.nsggd_chunk(z, v, idx, noise, etas)
        best = min(best, time.perf_counter() - t0)
    return best, v


def main():
    gen = np.random.default_rng(0)
    print(f"{'case':>24} {'numpy':>12} {'compiled':>12} {'speedup':>9}  max|diff|")
    for n, d, m, bsz, steps in [
        (500, 5, 2, 1, 20_000),
        (2000, 10, 2, 2, 50_000),
        (2000, 25, 2, 2, 20_000),
        (1000, 10, 5, 4, 20_000),
    ]:
        z = gen.standard_normal((n, d))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        v0 = np.linalg.qr(gen.standard_normal((d, m)))[0].copy()
        idx = gen.integers(0, n, size=(steps, bsz))
        noise = 1e-3 * gen.standard_normal((steps, d, m))
        etas = np.full(steps, 1e-3)
        t_py, v_py = bench(_kernels_py, z, v0, idx, noise, etas)
        label = f"n={n} d={d} m={m} B={bsz} T={steps}"
        if _kernels is None:
            print(f"{label:>24} {t_py:>10.3f} s {'absent':>12}")
            continue
        t_c, v_c = bench(_kernels, z, v0, idx, noise, etas)
        diff = np.abs(v_py - v_c).max()
        print(f"{label:>24} {t_py:>10.3f} s {t_c:>10.3f} s {t_py / t_c:>8.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()
