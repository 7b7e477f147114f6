"""Compiled vs numpy kernels on the figure-8 start.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np
from scipy.integrate import solve_ivp

from choreo8 import _kernels_py, kernels
from choreo8.dynamics import canonical_initial_state


def best(stmt, repeat, number):
    return min(timeit.repeat(stmt, repeat=repeat, number=number)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernels not available; only the numpy backend is timed")
    y0 = np.ascontiguousarray(canonical_initial_state().flat)
    backends = {"numpy": _kernels_py}
    if kernels.BACKEND == "cython":
        from choreo8 import _kernels
        backends["cython"] = _kernels

    rows = []
    for name, mod in backends.items():
        rhs = best(lambda: mod.derivative(0.0, y0), args.repeat, 20000)
        rk4 = best(lambda: mod.rk4_fixed(y0, 1e-3, 6284, 100), args.repeat, 1)
        dop = best(lambda: solve_ivp(mod.derivative, (0.0, 2 * math.pi), y0, method="DOP853",
                                     rtol=1e-12, atol=1e-12, max_step=0.02), args.repeat, 1)
        rows.append((name, rhs, rk4, dop))

    print(f"{'backend':<8} {'rhs call (us)':>14} {'rk4 period (ms)':>16} {'DOP853 period (ms)':>19}")
    for name, rhs, rk4, dop in rows:
        print(f"{name:<8} {rhs * 1e6:14.2f} {rk4 * 1e3:16.1f} {dop * 1e3:19.1f}")
    if len(rows) == 2:
        (_, r0, k0, d0), (_, r1, k1, d1) = rows
        print(f"speedup  {r0 / r1:14.1f}x {k0 / k1:15.1f}x {d0 / d1:18.1f}x")


if __name__ == "__main__":
    main()
