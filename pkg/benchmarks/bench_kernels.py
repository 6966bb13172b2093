"""Compare the numba and numpy backends on the two hot kernels.

    python benchmarks/bench_kernels.py [--repeat N]

The first numba call includes JIT compilation and is reported separately.
"""

import argparse
import time

import numpy as np

from minkrot import kernels
from minkrot._jit import HAVE_NUMBA
from minkrot.surface import build_surface
from minkrot.weighted import Density


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_fields(n, repeat):
    s = build_surface("type1", 1.0, 1.0, "sin(u)", "cos(u)", (-0.7, 0.7))
    u = np.linspace(-0.7, 0.7, n)
    v = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    fj, gj = s.jets(u)
    args = (fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2, v, 1.0, 1.0, -1.0,
            *Density(0.3, -0.7, 1.1, 0.4).as_tuple())
    rows = []
    for backend in ("numpy", "numba"):
        if backend == "numba" and not HAVE_NUMBA:
            continue
        t0 = time.perf_counter()
        kernels.weighted_fields(*args, backend=backend)
        first = time.perf_counter() - t0
        best = _time(lambda: kernels.weighted_fields(*args, backend=backend), repeat)
        rows.append((f"weighted_fields {n}x{n}", backend, first, best))
    return rows


def bench_rk4(step, repeat):
    args = (kernels.MINIMAL_F_IS_U, -1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.5, step)
    rows = []
    for backend in ("numpy", "numba"):
        if backend == "numba" and not HAVE_NUMBA:
            continue
        t0 = time.perf_counter()
        kernels.rk4_meridian(*args, backend=backend)
        first = time.perf_counter() - t0
        best = _time(lambda: kernels.rk4_meridian(*args, backend=backend), repeat)
        rows.append((f"rk4_meridian h={step:g}", backend, first, best))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--grid", type=int, default=401)
    ap.add_argument("--step", type=float, default=1e-4)
    args = ap.parse_args()
    rows = bench_fields(args.grid, args.repeat) + bench_rk4(args.step, args.repeat)
    print(f"{'kernel':<28}{'backend':<9}{'first call':>12}{'best':>12}")
    for name, backend, first, best in rows:
        print(f"{name:<28}{backend:<9}{first * 1e3:>10.2f}ms{best * 1e3:>10.2f}ms")


if __name__ == "__main__":
    main()
