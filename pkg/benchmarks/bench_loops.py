#!/usr/bin/env python3
"""Benchmark the simulation kernels: compiled extension vs pure-Python twin.

Runs the three hot loops (open-loop lag, relay feedback, closed-loop PID) on
the benchmark plant at the default 0.01 s sample time and reports wall time
per run and the compiled-core speedup.

    python benchmarks/bench_loops.py [--duration 100] [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from relaytune import _loops_py

try:
    from relaytune import _loops_c
except ImportError:
    _loops_c = None

GAIN, TAU, DEAD = 0.322, 1.33, 1.3
DT = 0.01


def _best_of(repeat, fn):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(duration):
    n = int(round(duration / DT)) + 1
    alpha = math.exp(-DT / TAU)
    b = GAIN * (1.0 - alpha)
    delay = int(round(DEAD / DT))
    rng = np.random.default_rng(0)
    u_in = rng.standard_normal(n)
    sp = np.ones(n)
    beta = math.exp(-DT * 20.0 / 0.8746)

    def lag(impl):
        y = np.zeros(n)
        impl.lag_loop(u_in, y, alpha, b, delay, 0.0)

    def relay(impl):
        y, u = np.zeros(n), np.zeros(n)
        impl.relay_loop(y, u, alpha, b, delay, 0.0, 1.0, 0.0)

    def pid(impl):
        y, u = np.zeros(n), np.zeros(n)
        impl.pid_loop(sp, y, u, alpha, b, delay, 0.0, 3.99, 1.0 / 3.4985,
                      0.8746, beta, DT, -0.5, n // 2, math.nan, math.nan)

    return n, [("lag_loop", lag), ("relay_loop", relay), ("pid_loop", pid)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--duration", type=float, default=100.0,
                    help="simulated seconds per run (default 100)")
    ap.add_argument("--repeat", type=int, default=5,
                    help="repetitions; best time is reported (default 5)")
    args = ap.parse_args()

    n, cases = make_cases(args.duration)
    print(f"{n} samples per run (duration {args.duration:g} s at dt {DT:g} s), "
          f"best of {args.repeat}")
    if _loops_c is None:
        print("compiled core not built: timing the pure-Python twin only")
    header = f"{'kernel':<12} {'python':>12} {'compiled':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn in cases:
        t_py = _best_of(args.repeat, lambda: fn(_loops_py))
        if _loops_c is not None:
            t_c = _best_of(args.repeat, lambda: fn(_loops_c))
            print(f"{name:<12} {t_py * 1e3:>9.2f} ms {t_c * 1e3:>9.3f} ms "
                  f"{t_py / t_c:>8.1f}x")
        else:
            print(f"{name:<12} {t_py * 1e3:>9.2f} ms {'n/a':>12} {'n/a':>9}")


if __name__ == "__main__":
    main()
