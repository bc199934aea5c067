#!/usr/bin/env python3
"""Time the grid-propagation kernel: numba-compiled vs plain Python.

    python3 benchmarks/bench_kernels.py [--steps 200000] [--repeat 5]

Both backends run the disturbance-free pendulum closed loop with a perfect
estimate (no triggering) over the same grid; the script checks the two traces
are bitwise equal before timing.
"""

import argparse
import time

import numpy as np

from etcsim._kernels import propagate_jit, propagate_py
from etcsim.simulator import Disturbance, _pendulum_system


def make_inputs(n_steps, h=0.005):
    _, system = _pendulum_system()
    phi, gam = system.discretize(h)
    w_table = Disturbance("zero").table(system, n_steps)
    s = np.zeros((n_steps + 1, system.n))
    s[0] = system.Pinv @ np.array([0.0, 0.0, 0.0, 0.1])
    return dict(system=system, phi=phi, gam=gam, w_table=w_table, s0=s, h=h, n_steps=n_steps)


def run(kernel, inp):
    sysm = inp["system"]
    n = inp["n_steps"]
    s = inp["s0"].copy()
    shat = s.copy()
    u = np.zeros(n)
    w = np.zeros((n, sysm.n))
    kernel(0, n, inp["h"], False, sysm.m, 1.0, sysm.lam, inp["phi"], inp["gam"], sysm.Bt,
           sysm.kt, inp["w_table"], np.zeros(sysm.n), 0, s, shat, u, w)
    return s, shat, u


def best_of(kernel, inp, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        run(kernel, inp)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    inp = make_inputs(args.steps)
    t0 = time.perf_counter()
    ref = run(propagate_jit, inp)  # first call compiles (or loads the cache)
    warm = time.perf_counter() - t0
    got = run(propagate_py, inp)
    for a, b in zip(ref, got):
        assert np.array_equal(a, b), "backends disagree"

    t_jit = best_of(propagate_jit, inp, args.repeat)
    t_py = best_of(propagate_py, inp, max(1, args.repeat // 2))
    print(f"steps={args.steps}")
    print(f"numba first call (incl. compile/cache load): {warm:.3f} s")
    print(f"numba  best: {t_jit * 1e3:9.2f} ms  ({args.steps / t_jit / 1e6:.1f} Msteps/s)")
    print(f"python best: {t_py * 1e3:9.2f} ms  ({args.steps / t_py / 1e6:.3f} Msteps/s)")
    print(f"speedup: {t_py / t_jit:.0f}x")


if __name__ == "__main__":
    main()
