"""Side-by-side timing of the stencil kernels (compiled vs numpy).

Runs the two hot loops — the operator sweep and the damped relaxation march —
on unit-disk grids of increasing resolution, once per available backend, and
prints a small table with the speedup. Both backends are fed bitwise-identical
inputs and are checked for bitwise-identical outputs before timing, so the
numbers compare the same arithmetic, not two different algorithms.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --spacings 1/32,1/64,1/128 --W 4
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from trunclap import geometry as g
from trunclap import kernels
from trunclap.grid import build_stencil, rasterize

_MARCH_CFL = 0.45


def _best_of(fn, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_grid(h: float, W: int, repeats: int, steps: int):
    grid = rasterize(g.Ball(1.0), h, build_stencil(W))
    rng = np.random.default_rng(0)
    u = rng.uniform(0.5, 1.5, grid.n_interior)
    f = np.ones(grid.n_interior)
    tau = _MARCH_CFL * grid.cfl_min_product()

    rows = []
    ref_apply = None
    ref_march = None
    for backend in kernels.available_backends():
        out, arg = kernels.apply_grid(grid, u, backend=backend)
        v = f.copy()
        kernels.march_grid(grid, v, f, tau, steps, 0.0, backend=backend)
        if ref_apply is None:
            ref_apply, ref_march = (out, arg), v
        else:
            assert np.array_equal(ref_apply[0], out)
            assert np.array_equal(ref_apply[1], arg)
            assert np.array_equal(ref_march, v)

        t_apply = _best_of(
            lambda: kernels.apply_grid(grid, u, backend=backend), repeats
        )
        t_march = _best_of(
            lambda: kernels.march_grid(
                grid, f.copy(), f, tau, steps, 0.0, backend=backend
            ),
            repeats,
        )
        rows.append((backend, t_apply, t_march))
    return grid, rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "--spacings",
        default="1/16,1/32,1/64",
        help="comma-separated grid spacings, fractions allowed (default %(default)s)",
    )
    ap.add_argument("--W", type=int, default=3, help="stencil width (default %(default)s)")
    ap.add_argument(
        "--repeats", type=int, default=5, help="timing repeats, best kept (default %(default)s)"
    )
    ap.add_argument(
        "--march-steps",
        type=int,
        default=500,
        help="relaxation steps per march timing (default %(default)s)",
    )
    args = ap.parse_args(argv)

    spacings = [float(Fraction(s)) for s in args.spacings.split(",")]
    print(f"unit disk, W={args.W}, default backend: {kernels.BACKEND}")
    print(
        f"{'h':>10} {'nodes':>8} {'backend':>8} {'apply (ms)':>12} "
        f"{'march x' + str(args.march_steps) + ' (ms)':>18}"
    )
    for h in spacings:
        grid, rows = bench_grid(h, args.W, args.repeats, args.march_steps)
        base_apply = base_march = None
        for backend, t_apply, t_march in rows:
            note = ""
            if backend == "numpy" and base_apply is not None:
                note = (
                    f"   (cython speedup: {t_apply / base_apply:.1f}x apply, "
                    f"{t_march / base_march:.1f}x march)"
                )
            elif backend == "cython":
                base_apply, base_march = t_apply, t_march
            print(
                f"{h:>10.5f} {grid.n_interior:>8d} {backend:>8} "
                f"{1e3 * t_apply:>12.3f} {1e3 * t_march:>18.1f}{note}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
