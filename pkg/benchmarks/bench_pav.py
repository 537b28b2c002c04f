"""Benchmark the compiled PAV kernel against the pure-Python fallback.

Also times the full permutahedron projection on large inputs as a complexity
guard: doubling n should roughly double the sort-dominated runtime
(O(n log n)), far from quadratic growth.

Run:  python3 benchmarks/bench_pav.py
"""

import time

import numpy as np

from lorenz_rank import COMPILED_PAV, GgfWeights, permutahedron_project
from lorenz_rank import _pav_py

try:
    from lorenz_rank import _pavc
except ImportError:
    _pavc = None


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels():
    rng = np.random.default_rng(0)
    print(f"compiled extension built: {COMPILED_PAV}")
    print(f"{'n':>9} {'python (s)':>12} {'compiled (s)':>13} {'speedup':>9}")
    for n in (1_000, 10_000, 100_000, 1_000_000):
        y = rng.normal(size=n)
        t_py = time_call(_pav_py.pav_blocks, y)
        if _pavc is not None:
            t_c = time_call(_pavc.pav_blocks, y)
            sol_c, _ = _pavc.pav_blocks(y)
            sol_py, _ = _pav_py.pav_blocks(y)
            assert np.array_equal(sol_c, sol_py), "backends disagree"
            print(f"{n:>9} {t_py:>12.4f} {t_c:>13.4f} {t_py / t_c:>8.1f}x")
        else:
            print(f"{n:>9} {t_py:>12.4f} {'n/a':>13} {'n/a':>9}")


def bench_projection_scaling():
    rng = np.random.default_rng(1)
    print("\nfull projection (sort + PAV + scatter), complexity guard:")
    print(f"{'n':>9} {'time (s)':>10} {'time/(n log n) (ns)':>21}")
    for n in (100_000, 200_000, 400_000, 800_000, 1_600_000):
        w = np.sort(rng.uniform(0.0, 1.0, size=n))[::-1]
        w /= w[0]
        w[0] = 1.0
        weights = GgfWeights(w)
        z = rng.normal(size=n)
        t = time_call(permutahedron_project, weights, z, repeats=2)
        per_op = t / (n * np.log2(n)) * 1e9
        print(f"{n:>9} {t:>10.4f} {per_op:>21.3f}")


if __name__ == "__main__":
    bench_kernels()
    bench_projection_scaling()
