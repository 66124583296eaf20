#!/usr/bin/env python3
"""Benchmark the compiled RK4 kernels against the pure-numpy fallback.

Runs the density-matrix evolution and the five-variable rate system on both
backends, checks they agree, and prints timings.  The compiled backend is
skipped (with a note) when the extension is not built.

Usage: python benchmarks/bench_backends.py [--n-max N] [--steps N]
"""

import argparse
import time

import numpy as np

from twocav import _core_py
from twocav.lindblad import build_space, traveling_generator
from twocav.parameters import TravelingWaveParams
from twocav.rates import traveling_system

try:
    from twocav import _core
except ImportError:
    _core = None


def _time(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()

    space = build_space(args.n_max, modes=2)
    gen = traveling_generator(space, rabi=0.2, coupling=1.0, kappa=1.0)
    rho0 = space.vacuum_density()
    dt = 0.005

    p = TravelingWaveParams(kappa=1.0, coupling=1.0, rabi=1.0)
    system = traveling_system(p)
    y0 = np.zeros(5)

    rows = []
    t_py, out_py = _time(lambda: _core_py.rk4_lindblad(
        gen.g, gen.gh, gen.cs, gen.chs, rho0, dt, args.steps, args.steps))
    rows.append(("lindblad rk4", f"dim {space.dimension}, {args.steps} steps",
                 "python", t_py))
    if _core is not None:
        t_c, out_c = _time(lambda: _core.rk4_lindblad(
            gen.g, gen.gh, gen.cs, gen.chs, rho0, dt, args.steps, args.steps))
        gap = np.abs(out_c - out_py).max()
        rows.append(("lindblad rk4", f"agreement {gap:.2e}", "compiled", t_c))

    steps5 = 50 * args.steps
    t_py5, out_py5 = _time(lambda: _core_py.rk4_affine(
        system.matrix, system.constant, y0, 1e-4, steps5, steps5))
    rows.append(("affine rk4", f"dim 5, {steps5} steps", "python", t_py5))
    if _core is not None:
        t_c5, out_c5 = _time(lambda: _core.rk4_affine(
            system.matrix, system.constant, y0, 1e-4, steps5, steps5))
        gap = np.abs(out_c5 - out_py5).max()
        rows.append(("affine rk4", f"agreement {gap:.2e}", "compiled", t_c5))

    print(f"{'kernel':<14} {'case':<28} {'backend':<9} {'best (s)':>10}")
    for name, case, backend, t in rows:
        print(f"{name:<14} {case:<28} {backend:<9} {t:>10.4f}")
    if _core is None:
        print("compiled backend not built; showing the fallback only")
    else:
        speed_l = t_py / t_c
        speed_a = t_py5 / t_c5
        print(f"speedup: lindblad x{speed_l:.1f}, affine x{speed_a:.1f}")


if __name__ == "__main__":
    main()
