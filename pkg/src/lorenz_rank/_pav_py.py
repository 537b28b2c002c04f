"""Pure-Python pool-adjacent-violators kernel (fallback for the compiled one).

Mirrors ``_pavc.pyx`` operation for operation so both backends produce
bit-identical output: block sums are accumulated in the same order and means
are compared by cross-multiplication (counts are positive integers).
"""

from __future__ import annotations

import numpy as np


def pav_blocks(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nondecreasing least-squares fit of ``y`` plus pooled block starts."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    sums = np.empty(n)
    counts = np.empty(n, dtype=np.int64)
    starts = np.empty(n, dtype=np.int64)
    nb = 0
    for i in range(n):
        cur_sum = y[i]
        cur_count = 1
        # merge while the previous block mean strictly exceeds the current one
        while nb > 0 and sums[nb - 1] * cur_count > cur_sum * counts[nb - 1]:
            cur_sum += sums[nb - 1]
            cur_count += counts[nb - 1]
            nb -= 1
        sums[nb] = cur_sum
        counts[nb] = cur_count
        starts[nb] = i - cur_count + 1
        nb += 1
    sol = np.repeat(sums[:nb] / counts[:nb], counts[:nb])
    return sol, starts[:nb].copy()
