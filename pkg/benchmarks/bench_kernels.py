"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot per-step operations (batched tridiagonal sweeps, upwind
drift divergence, CFL outflow reduction) on representative workloads, then a
full IMEX step on the s2-smoke configuration.  Both backends are imported
directly; end-to-end runs select the fallback via ARKS_PURE_PYTHON=1.

Usage: python benchmarks/bench_kernels.py [--cells 128] [--repeats 50]
"""

import argparse
import time

import numpy as np

from arks._kernels import _numpy_backend as np_backend

try:
    from arks._kernels import _cy_backend as cy_backend
except ImportError:
    cy_backend = None


def _time(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels(cells, repeats):
    rng = np.random.default_rng(0)
    n = cells
    lower = np.full(n, -0.25)
    lower[0] = 0.0
    upper = np.full(n, -0.25)
    upper[-1] = 0.0
    diag = 1.0 - (lower + upper)
    rhs = rng.random((n, n))
    u = rng.random((n, n))
    vx = rng.standard_normal((n - 1, n))
    vy = rng.standard_normal((n, n - 1))
    out = np.zeros_like(u)

    cases = {
        f"tridiag_solve ({n} lines x {n})": lambda b: b.tridiag_solve(lower, diag, upper, rhs),
        f"upwind_div_2d ({n}x{n})": lambda b: b.add_upwind_div_2d(u, vx, vy, float(n), float(n), out),
        f"outflow_rate_2d ({n}x{n})": lambda b: b.outflow_rate_2d(vx, vy, float(n), float(n)),
    }
    rows = []
    for name, call in cases.items():
        t_np = _time(lambda: call(np_backend), repeats)
        if cy_backend is not None:
            t_cy = _time(lambda: call(cy_backend), repeats)
            rows.append((name, t_np, t_cy, t_np / t_cy))
        else:
            rows.append((name, t_np, float("nan"), float("nan")))
    return rows


def bench_full_step(backend, repeats):
    """One IMEX step of the s2-smoke configuration with a chosen backend."""
    import arks._kernels as K
    from arks import experiments, presets
    from arks import stepper as ST

    saved = {name: getattr(K, name) for name in K.__all__ if name != "BACKEND"}
    try:
        for name in saved:
            setattr(K, name, getattr(backend, name))
        cfg = presets.load("s2-smoke")
        prep = experiments._prepared(cfg, cfg.eps)
        state = prep["state"]
        dt = 1e-5
        t = _time(lambda: ST.step(state, cfg.model, prep["ctrl"], dt), repeats)
    finally:
        for name, fn in saved.items():
            setattr(K, name, fn)
    return t


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", type=int, default=128)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    print(f"{'kernel':<34}{'numpy':>12}{'cython':>12}{'speedup':>9}")
    for name, t_np, t_cy, speedup in bench_kernels(args.cells, args.repeats):
        print(f"{name:<34}{t_np * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us{speedup:>8.1f}x")

    if cy_backend is not None:
        t_np = bench_full_step(np_backend, max(args.repeats // 5, 5))
        t_cy = bench_full_step(cy_backend, max(args.repeats // 5, 5))
        print(f"{'full IMEX step (s2-smoke, 128^2)':<34}{t_np * 1e3:>10.2f}ms"
              f"{t_cy * 1e3:>10.2f}ms{t_np / t_cy:>8.1f}x")
    else:
        print("compiled backend not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
