"""Desk-scale experiment engine: synthetic data, sweeps, audits, grid oracle.

The oracle replaces a linear-program solution of the welfare maximization at
tiny sizes: with one recommendation slot the policy space is a product of
per-user simplices, which is enumerated on a uniform grid and evaluated with
the exact objective. Sweeps run the optimizer across a trade-off grid and
retain the exact utility vectors so Pareto-dominance audits can run on them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import ExposureWeights, PreferenceMatrix, item_exposures, user_utilities
from .optimizer import ConvergenceTrace, OptimizerConfig, phi, run_optimizer
from .welfare import (
    gini_index,
    lorenz_curve,
    parse_weight_scheme,
    strictly_lorenz_dominates,
    weakly_lorenz_dominates,
)


def worker_count() -> int:
    """Thread cap from LORENZ_RANK_THREADS (0 or unset means automatic)."""
    raw = os.environ.get("LORENZ_RANK_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError("LORENZ_RANK_THREADS must be an integer") from exc
    if value <= 0:
        return min(8, os.cpu_count() or 1)
    return value


def synthetic_prefs(n: int, m: int, skew: float, seed: int) -> PreferenceMatrix:
    """Seeded preference matrix with power-law item popularity.

    mu_ij = clip(p_j * s_i * eps_ij, 0, 1) with popularity p_j = j^(-skew)
    scaled to max 1, user scale s_i uniform on [0.5, 1], and lognormal noise.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if skew < 0:
        raise ValueError("skew must be >= 0")
    rng = np.random.default_rng(seed)
    popularity = np.arange(1, m + 1, dtype=np.float64) ** (-skew)
    popularity /= popularity.max()
    scale = rng.uniform(0.5, 1.0, size=n)
    noise = rng.lognormal(mean=0.0, sigma=0.25, size=(n, m))
    values = np.clip(popularity[None, :] * scale[:, None] * noise, 0.0, 1.0)
    return PreferenceMatrix(values)


def quantile_cumulative_utility(x: np.ndarray, q: float) -> float:
    """Cumulative utility of the floor(q n) worst-off entries."""
    x = np.asarray(x, dtype=np.float64)
    k = int(np.floor(q * x.shape[0]))
    if k < 1:
        raise ValueError(f"quantile index floor(q*n) = {k} must be >= 1")
    k = min(k, x.shape[0])
    return float(lorenz_curve(x)[k - 1])


@dataclass(frozen=True)
class SweepRecord:
    """One Pareto-front point with its exact utility vectors retained."""

    lam: float
    objective_kind: str
    weights_user: str
    weights_item: str
    total_utility: float
    gini_exposure: float
    quantile_utilities: tuple[tuple[float, float], ...]
    final_objective: float
    iterations: int
    seed: int
    user_utilities: np.ndarray
    item_exposures: np.ndarray


def _sweep_point(config: OptimizerConfig, lam: float, prefs: PreferenceMatrix,
                 exp: ExposureWeights, quantiles: tuple[float, ...]) -> SweepRecord:
    run_config = config.replace(lam=lam)
    policy, trace = run_optimizer(run_config, prefs, exp)
    u = user_utilities(policy, prefs, exp)
    v = item_exposures(policy, exp)
    return SweepRecord(
        lam=lam,
        objective_kind=run_config.objective,
        weights_user=run_config.user_weights,
        weights_item=run_config.item_weights,
        total_utility=float(u.sum()),
        gini_exposure=gini_index(v),
        quantile_utilities=tuple((q, quantile_cumulative_utility(u, q)) for q in quantiles),
        final_objective=trace.final_objective(),
        iterations=run_config.T,
        seed=run_config.seed,
        user_utilities=u,
        item_exposures=v,
    )


def pareto_sweep(config: OptimizerConfig, lambda_grid, prefs: PreferenceMatrix,
                 exp: ExposureWeights,
                 quantiles: tuple[float, ...] = (0.25, 0.5)) -> list[SweepRecord]:
    """One optimizer run per trade-off value; records ordered as the grid."""
    if config.reciprocal or config.objective in ("reciprocal-ggf", "eq-utility"):
        raise ValueError("sweeps are defined for one-sided objectives")
    grid = [float(lam) for lam in lambda_grid]
    if any(not (0.0 <= lam <= 1.0) for lam in grid):
        raise ValueError("lambda grid values must lie in [0, 1]")
    workers = min(worker_count(), max(len(grid), 1))
    if workers <= 1:
        return [_sweep_point(config, lam, prefs, exp, quantiles) for lam in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(
            lambda lam: _sweep_point(config, lam, prefs, exp, quantiles), grid))


@dataclass(frozen=True)
class AuditViolation:
    first: int
    second: int
    dominant: int


@dataclass(frozen=True)
class AuditReport:
    violations: tuple[AuditViolation, ...]
    pairs_checked: int


def _jointly_dominates(u_a, v_a, u_b, v_b, tol: float) -> bool:
    """Does (u_a, v_a) weakly dominate (u_b, v_b) with one side strict?"""
    return (weakly_lorenz_dominates(u_a, u_b, tol)
            and strictly_lorenz_dominates(v_a, v_b, tol)) or \
           (weakly_lorenz_dominates(v_a, v_b, tol)
            and strictly_lorenz_dominates(u_a, u_b, tol))


def lorenz_audit(records: list[SweepRecord], tol: float = 1e-6) -> AuditReport:
    """Flag sweep points whose utility profiles are jointly Lorenz-dominated.

    A flagged pair certifies a Lorenz-efficiency failure of the dominated
    point; near-optimal welfare maximizers should produce none.
    """
    violations = []
    checked = 0
    for a in range(len(records)):
        for b in range(a + 1, len(records)):
            checked += 1
            ra, rb = records[a], records[b]
            if _jointly_dominates(rb.user_utilities, rb.item_exposures,
                                  ra.user_utilities, ra.item_exposures, tol):
                violations.append(AuditViolation(first=a, second=b, dominant=b))
            elif _jointly_dominates(ra.user_utilities, ra.item_exposures,
                                    rb.user_utilities, rb.item_exposures, tol):
                violations.append(AuditViolation(first=a, second=b, dominant=a))
    return AuditReport(violations=tuple(violations), pairs_checked=checked)


@dataclass(frozen=True)
class OracleResult:
    """Certified grid maximum of a concave objective over tiny policy spaces."""

    optimum: float
    argmax: tuple
    resolution: float


def _simplex_grid(choices: int, steps: int) -> np.ndarray:
    """All probability vectors over `choices` outcomes with entries k/steps."""
    if choices == 1:
        return np.ones((1, 1))
    if choices == 2:
        k = np.arange(steps + 1, dtype=np.float64)
        return np.stack([k, steps - k], axis=1) / steps
    points = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            points.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], steps, choices)
    return np.asarray(points, dtype=np.float64) / steps


def _batch_objective(config: OptimizerConfig, n: int, m: int):
    """Vectorized exact objective over rows of utility/exposure blocks."""
    kind = config.objective
    if kind == "two-sided-ggf":
        w1 = parse_weight_scheme(config.user_weights, n).w
        w2 = parse_weight_scheme(config.item_weights, m).w
        lam = config.lam

        def value(U, V):
            return (1.0 - lam) * (np.sort(U, axis=1) @ w1) \
                + lam * (np.sort(V, axis=1) @ w2)
        return value
    if kind == "welf":
        def value(U, V):
            return (1.0 - config.lam) * phi(U, config.alpha1).sum(axis=1) \
                + config.lam * phi(V, config.alpha2).sum(axis=1)
        return value
    if kind == "eq-exposure":
        def value(U, V):
            dev = V - V.mean(axis=1, keepdims=True)
            return U.sum(axis=1) - (config.lam / m) * np.sqrt((dev * dev).sum(axis=1))
        return value
    if kind == "reciprocal-ggf":
        w = parse_weight_scheme(config.user_weights, n).w

        def value(U2):
            return np.sort(U2, axis=1) @ w
        return value
    if kind == "eq-utility":
        def value(U2):
            dev = U2 - U2.mean(axis=1, keepdims=True)
            return U2.sum(axis=1) - (config.lam / n) * np.sqrt((dev * dev).sum(axis=1))
        return value
    raise ValueError(f"unknown objective {kind!r}")


def grid_oracle(config: OptimizerConfig, prefs: PreferenceMatrix,
                exp: ExposureWeights, resolution: float) -> OracleResult:
    """Exhaustive grid maximum of the configured objective (K = 1 only).

    The policy space must have at most 4 free parameters; the optimum is a
    certified lower bound on the true maximum, within a Lipschitz multiple of
    the resolution of it.
    """
    if config.K != 1 or exp.K != 1:
        raise ValueError("the grid oracle supports K = 1 only")
    steps = int(round(1.0 / resolution))
    if steps < 1 or abs(steps * resolution - 1.0) > 1e-9:
        raise ValueError("resolution must be the reciprocal of a positive integer")
    reciprocal = config.reciprocal or config.objective in ("reciprocal-ggf", "eq-utility")
    n, m = prefs.n, prefs.m
    b1 = float(exp.b[0])
    if reciprocal:
        if n != m:
            raise ValueError("reciprocal oracle needs a square matrix")
        choices = n - 1
    else:
        choices = m
    if n * (choices - 1) > 4:
        raise ValueError("unsupported: more than 4 free policy parameters")

    frac = _simplex_grid(choices, steps)
    mu = prefs.values
    tables = []
    for user in range(n):
        if reciprocal:
            cols = [j for j in range(m) if j != user]
            X = np.zeros((frac.shape[0], m))
            X[:, cols] = frac
        else:
            X = frac
        tables.append(X)
    own_utility = [b1 * (tables[u] @ mu[u]) for u in range(n)]
    if reciprocal:
        side = config.side_lambda
        contrib = [b1 * tables[u] * mu[u][None, :] for u in range(n)]
    else:
        contrib = [b1 * tables[u] for u in range(n)]
    value_fn = _batch_objective(config, n, m)

    last = n - 1
    block_size = tables[last].shape[0]
    best_value = -np.inf
    best_arg: tuple = ()
    prefix_sizes = [tables[u].shape[0] for u in range(last)]
    for prefix_idx in np.ndindex(*prefix_sizes):
        contrib_prefix = sum(contrib[u][prefix_idx[u]] for u in range(last)) \
            if last else np.zeros(m)
        U = np.empty((block_size, n))
        for u in range(last):
            U[:, u] = own_utility[u][prefix_idx[u]]
        U[:, last] = own_utility[last]
        V = contrib_prefix[None, :] + contrib[last]
        if reciprocal:
            U2 = 2.0 * ((1.0 - side) * U + side * V)
            values = value_fn(U2)
        else:
            values = value_fn(U, V)
        pos = int(np.argmax(values))
        if values[pos] > best_value:
            best_value = float(values[pos])
            best_arg = tuple(prefix_idx) + (pos,)

    argmax = tuple(tuple(tables[u][best_arg[u]]) for u in range(n))
    return OracleResult(optimum=best_value, argmax=argmax, resolution=resolution)


@dataclass(frozen=True)
class ConvergenceComparison:
    """Aligned traces of the subgradient ablation and smoothing runs."""

    subgradient: ConvergenceTrace
    smoothing: tuple[tuple[float, ConvergenceTrace], ...]


def convergence_compare(config: OptimizerConfig, prefs: PreferenceMatrix,
                        exp: ExposureWeights,
                        beta0_grid=(1.0, 10.0, 100.0)) -> ConvergenceComparison:
    """Run both variants with a shared configuration and several beta0."""
    def run_sub():
        _, trace = run_optimizer(config.replace(variant="subgradient"), prefs, exp)
        return trace

    def run_smooth(beta0):
        _, trace = run_optimizer(
            config.replace(variant="smoothing", beta0=beta0), prefs, exp)
        return trace

    betas = [float(b) for b in beta0_grid]
    workers = min(worker_count(), len(betas) + 1)
    if workers <= 1:
        sub = run_sub()
        smooth = [run_smooth(b) for b in betas]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sub_future = pool.submit(run_sub)
            smooth_futures = [pool.submit(run_smooth, b) for b in betas]
            sub = sub_future.result()
            smooth = [f.result() for f in smooth_futures]
    return ConvergenceComparison(
        subgradient=sub, smoothing=tuple(zip(betas, smooth)))
