"""Optimizer iteration-cost scaling across a 10x size sweep.

Each iteration is dominated by assembling the n x m score blend plus one
top-K sort per user, so time per iteration should track n*m + n*K*log K.
This is a benchmark, not an assertion: eyeball that the normalized column
stays within a small factor across the sweep.

Run:  python3 benchmarks/bench_iteration.py
"""

import time

import numpy as np

from lorenz_rank import dcg_exposure_weights, fw_smoothing, synthetic_prefs
from lorenz_rank.optimizer import OptimizerConfig


def time_run(n, m, K, T=60):
    prefs = synthetic_prefs(n, m, 0.5, seed=0)
    exp = dcg_exposure_weights(m, K)
    config = OptimizerConfig(T=T, K=K, lam=0.5, user_weights="uniform",
                             item_weights="gini", trace_every=T)
    start = time.perf_counter()
    fw_smoothing(config, prefs, exp)
    return (time.perf_counter() - start) / T


def main():
    K = 5
    print(f"{'n':>6} {'m':>6} {'per-iter (ms)':>14} {'normalized (ns)':>16}")
    baseline = None
    for scale in (1, 2, 4, 10):
        n = 50 * scale
        m = 50 * scale
        per_iter = time_run(n, m, K)
        work = n * m + n * K * np.log2(K)
        normalized = per_iter / work * 1e9
        if baseline is None:
            baseline = normalized
        print(f"{n:>6} {m:>6} {per_iter * 1e3:>14.3f} {normalized:>16.2f}"
              f"   ({normalized / baseline:.2f}x of smallest)")


if __name__ == "__main__":
    main()
