"""Compare the compiled kernels against the numpy fallback.

Runs the two hot paths (streamline tracing and ray occlusion counting) on
identical inputs with both backends, checks they agree, and prints timings.

Usage: python3 benchmarks/bench_kernels.py [--seeds N] [--rays N]
"""
import argparse
import time

import numpy as np

from isoflow import generate_synthetic
from isoflow.kernels import _pykernels

try:
    from isoflow.kernels import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, repeats=3):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_trace(n_seeds):
    g = generate_synthetic("rotation", (65, 65, 65))
    vec = g.vector_view("velocity").astype(np.float64)
    rng = np.random.default_rng(0)
    seeds = rng.uniform(0.1, 0.9, (n_seeds, 3))
    args = (vec, g.origin, g.spacing, seeds, 0.01, 500, 1e-9, +1)

    t_py, (pp, pc) = timeit(lambda: _pykernels.trace_batch(*args))
    print(f"trace_batch   python  {n_seeds} seeds x 500 steps: {t_py:.3f}s")
    if _ckernels is None:
        print("trace_batch   c       unavailable")
        return
    t_c, (cp, cc) = timeit(lambda: _ckernels.trace_batch(*args))
    assert np.array_equal(pc, cc)
    for n in range(n_seeds):
        assert np.allclose(pp[n, :pc[n]], cp[n, :cc[n]], atol=1e-12)
    print(f"trace_batch   c       {n_seeds} seeds x 500 steps: {t_c:.3f}s "
          f"({t_py / t_c:.1f}x)")


def bench_rays(n_rays):
    rng = np.random.default_rng(1)
    n_tri = 5000
    v0 = rng.uniform(-1, 1, (n_tri, 3))
    v1 = v0 + rng.uniform(-0.2, 0.2, (n_tri, 3))
    v2 = v0 + rng.uniform(-0.2, 0.2, (n_tri, 3))
    surf = rng.integers(0, 4, n_tri).astype(np.int32)
    eye = np.array([0.0, 0.0, 5.0])
    targets = rng.uniform(-1, 1, (n_rays, 3))
    args = (eye, targets, v0, v1, v2, surf, 4)

    t_py, a = timeit(lambda: _pykernels.ray_surface_counts(*args))
    print(f"ray_counts    python  {n_rays} rays x {n_tri} tris: {t_py:.3f}s")
    if _ckernels is None:
        print("ray_counts    c       unavailable")
        return
    t_c, b = timeit(lambda: _ckernels.ray_surface_counts(*args))
    assert np.array_equal(a, b)
    print(f"ray_counts    c       {n_rays} rays x {n_tri} tris: {t_c:.3f}s "
          f"({t_py / t_c:.1f}x)")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=2000)
    ap.add_argument("--rays", type=int, default=20000)
    args = ap.parse_args()
    bench_trace(args.seeds)
    bench_rays(args.rays)


if __name__ == "__main__":
    main()
