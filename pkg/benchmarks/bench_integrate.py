#!/usr/bin/env python3
"""Benchmark: compiled integrator core versus the pure-Python fallback.

Runs the cycle-measurement workload (the hot path of the analysis) for a
few kernel orders and horizons and reports wall times and speedups.

Usage: python benchmarks/bench_integrate.py [--repeats N]
"""

import argparse
import time

import numpy as np

from chaintrick._core import HAVE_COMPILED
from chaintrick.chain_system import build, constant_history_state
from chaintrick.model_core import DANA_MALGRANGE, MacroParams
from chaintrick.simulator import cycle_metrics, integrate

CASES = [
    ("m=1 cycle, horizon 4000", dict(m=1, T=3.0), 4000.0),
    ("m=2 cycle, horizon 4000", dict(m=2, T=3.0), 4000.0),
    ("m=4 cycle, horizon 4000", dict(m=4, T=3.0), 4000.0),
    ("m=1 long run, horizon 40000", dict(m=1, T=1.036), 40000.0),
]


def run_case(label, overrides, horizon, backend, repeats):
    p = MacroParams(
        alpha=0.9, gamma=0.15, delta=0.007, g=0.016, G0=2.0, T=1.0, m=1
    ).replace(**overrides)
    sys_ = build(p, DANA_MALGRANGE)
    s0 = constant_history_state(sys_, 15.0, 100.0)
    best = float("inf")
    traj = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        traj = integrate(sys_, s0, horizon, sample_dt=0.25, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, traj


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = ["python"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("compiled core not built; benchmarking the fallback only\n")

    width = max(len(label) for label, *_ in CASES)
    header = f"{'case':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, overrides, horizon in CASES:
        times = {}
        metrics = {}
        for backend in backends:
            times[backend], traj = run_case(
                label, overrides, horizon, backend, args.repeats
            )
            try:
                metrics[backend] = cycle_metrics(traj).period
            except Exception:
                metrics[backend] = float("nan")
        row = f"{label:<{width}}  " + "".join(
            f"{times[b] * 1e3:>10.1f}ms" for b in backends
        )
        if len(backends) == 2:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)
        if len(backends) == 2 and np.isfinite(metrics["python"]):
            rel = abs(metrics["python"] - metrics["compiled"]) / metrics["python"]
            assert rel < 1e-6, "backends disagree on the measured period"
    print("\nbackends agree on measured cycle periods to < 1e-6 relative.")


if __name__ == "__main__":
    main()
