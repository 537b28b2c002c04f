"""Frank-Wolfe optimization of welfare objectives over sparse ranking policies.

The smoothed variant follows the conditional-gradient template for nonsmooth
concave maximization: at iteration t the nonsmooth rank-weighted welfare is
replaced by its Moreau envelope with parameter beta_t = beta0 / sqrt(t), whose
gradient factorizes through a permutahedron projection of the current
utilities. The linear subproblem then reduces to one top-K sort per user, and
the iterate stays a sparse convex combination of deterministic assignments.

The subgradient variant plugs a welfare supergradient in place of the
envelope gradient (useful as an ablation; it has no convergence guarantee).
Two smooth baselines, additive power/log welfare and an exposure
standard-deviation penalty, run through the same loop with their exact
gradients.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .isotonic import moreau_grad_dual
from .model import (
    Assignment,
    ExposureWeights,
    PreferenceMatrix,
    RankingPolicy,
    assignment_item_exposures,
    assignment_user_utilities,
    deterministic_policy,
)
from .reciprocal import (
    ReciprocalInstance,
    assignment_received_utilities,
    eq_utility_dual,
    eq_utility_objective,
    masked_scores_topk,
    reciprocal_direction_scores,
)
from .welfare import GgfWeights, ggf_supergradient, ggf_value, parse_weight_scheme

OBJECTIVES = ("two-sided-ggf", "welf", "eq-exposure", "reciprocal-ggf", "eq-utility")
VARIANTS = ("smoothing", "subgradient")

POSITIVE_UTILITY_FLOOR = 1e-12
STD_EPS = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    """Run parameters; weight vectors are scheme strings resolved at run time."""

    T: int
    K: int
    lam: float = 0.5
    user_weights: str = "uniform"
    item_weights: str = "gini"
    objective: str = "two-sided-ggf"
    variant: str = "smoothing"
    beta0: float | None = None
    alpha1: float = 1.0
    alpha2: float = 0.0
    reciprocal: bool = False
    side_lambda: float = 0.5
    seed: int = 0
    trace_every: int = 10

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("lambda must lie in [0, 1]")
        if not (0.0 <= self.side_lambda <= 1.0):
            raise ValueError("side_lambda must lie in [0, 1]")
        if self.beta0 is not None and not (self.beta0 > 0.0):
            raise ValueError("beta0 must be positive")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")

    def replace(self, **kwargs) -> "OptimizerConfig":
        return dataclasses.replace(self, **kwargs)


@dataclass
class ConvergenceTrace:
    """Per-logged-iteration objective values of one optimizer run."""

    ts: list[int] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)
    objectives: list[float] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)

    def append(self, t: int, beta: float, objective: float, wall: float):
        if self.ts and t <= self.ts[-1]:
            raise ValueError("iteration indices must be strictly increasing")
        self.ts.append(t)
        self.betas.append(beta)
        self.objectives.append(objective)
        self.wall_ms.append(wall)

    def final_objective(self) -> float:
        return self.objectives[-1]

    def running_best(self) -> np.ndarray:
        return np.maximum.accumulate(np.asarray(self.objectives))


def beta_schedule(beta0: float, t: int) -> float:
    """Smoothing schedule beta_t = beta0 / sqrt(t)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return beta0 / math.sqrt(t)


def policy_diameter_bound(n: int, m: int) -> float:
    """Upper bound sqrt(2 n m) on the policy-set Euclidean diameter."""
    return math.sqrt(2.0 * n * m)


def default_beta0(n: int, m: int, K: int, w_user: GgfWeights,
                  w_item: GgfWeights | None, lam: float = 0.0,
                  b1: float = 1.0) -> float:
    """Default smoothing scale 2 * D * b_1 / ||w||.

    D is the diameter bound and ||w|| the norm of the concatenated
    (1 - lam)- and lam-scaled weight vectors; with a single weight vector
    (w_item None) the plain norm is used.
    """
    if w_item is None:
        norm = w_user.norm()
    else:
        norm = math.hypot((1.0 - lam) * w_user.norm(), lam * w_item.norm())
    if norm <= 0.0:
        raise ValueError("weight norm must be positive")
    return 2.0 * policy_diameter_bound(n, m) * b1 / norm


def update_direction(u_proj: np.ndarray | None, v_proj: np.ndarray | None,
                     prefs: PreferenceMatrix, lam: float, K: int) -> Assignment:
    """Linear-subproblem minimizer: per-user top-K of the negated blend.

    The blend is (1 - lam) * y1_i * mu_ij + lam * y2_j; the assignment sorting
    its K smallest entries (ties to lower index) minimizes the inner product
    of a policy with the smoothed-objective gradient.
    """
    scores = np.zeros((prefs.n, prefs.m))
    if lam < 1.0:
        if u_proj is None:
            raise ValueError("u_proj required when lambda < 1")
        scores += (1.0 - lam) * u_proj[:, None] * prefs.values
    if lam > 0.0:
        if v_proj is None:
            raise ValueError("v_proj required when lambda > 0")
        scores += lam * v_proj[None, :]
    return deterministic_policy(-scores, K)


def phi(x, alpha: float, floor: float | None = POSITIVE_UTILITY_FLOOR):
    """Power/log utility transform: x^a (a>0), log x (a=0), -x^a (a<0)."""
    x = np.asarray(x, dtype=np.float64)
    if alpha > 0:
        return x ** alpha
    if floor is None:
        if np.any(x <= 0.0):
            raise ValueError("nonpositive utility with alpha <= 0 and no floor")
    else:
        x = np.maximum(x, floor)
    if alpha == 0:
        return np.log(x)
    return -(x ** alpha)


def phi_prime(x, alpha: float, floor: float | None = POSITIVE_UTILITY_FLOOR):
    """Derivative of :func:`phi`; positive on the domain for every alpha."""
    x = np.asarray(x, dtype=np.float64)
    if alpha > 0:
        return alpha * x ** (alpha - 1.0)
    if floor is None:
        if np.any(x <= 0.0):
            raise ValueError("nonpositive utility with alpha <= 0 and no floor")
    else:
        x = np.maximum(x, floor)
    if alpha == 0:
        return 1.0 / x
    return -alpha * x ** (alpha - 1.0)


def welf_objective(u: np.ndarray, v: np.ndarray, alpha1: float, alpha2: float,
                   lam: float) -> float:
    """Additive welfare (1-lam) * sum phi(u, a1) + lam * sum phi(v, a2)."""
    return float((1.0 - lam) * phi(u, alpha1).sum() + lam * phi(v, alpha2).sum())


def welf_gradient_scores(prefs: PreferenceMatrix, u: np.ndarray, v: np.ndarray,
                         alpha1: float, alpha2: float, lam: float) -> np.ndarray:
    """Ascent scores (1-lam) * phi'(u_i) * mu_ij + lam * phi'(v_j)."""
    return (1.0 - lam) * phi_prime(u, alpha1)[:, None] * prefs.values \
        + lam * phi_prime(v, alpha2)[None, :]


def eq_exposure_objective(u: np.ndarray, v: np.ndarray, lam: float) -> float:
    """Total utility minus a lam-weighted exposure standard-deviation penalty."""
    m = v.shape[0]
    dev = v - v.mean()
    return float(u.sum() - (lam / m) * math.sqrt(float(dev @ dev)))


def eq_exposure_gradient_scores(prefs: PreferenceMatrix, u: np.ndarray,
                                v: np.ndarray, lam: float,
                                eps: float = STD_EPS) -> np.ndarray:
    """Ascent scores mu_ij - (lam/m) (v_j - mean v) / sqrt(spread + eps)."""
    m = v.shape[0]
    dev = v - v.mean()
    penalty_grad = (lam / m) * dev / math.sqrt(float(dev @ dev) + eps)
    return prefs.values - penalty_grad[None, :]


class _PolicyBuilder:
    """Convex-combination bookkeeping with merging of repeated assignments."""

    def __init__(self, first: Assignment):
        self._assignments = [first]
        self._index = {first.items.tobytes(): 0}
        self._raw = [1.0]
        self._scale = 1.0

    def mix(self, assignment: Assignment, eta: float):
        self._scale *= 1.0 - eta
        key = assignment.items.tobytes()
        idx = self._index.get(key)
        if idx is None:
            self._index[key] = len(self._assignments)
            self._assignments.append(assignment)
            self._raw.append(eta / self._scale)
        else:
            self._raw[idx] += eta / self._scale

    def build(self) -> RankingPolicy:
        coeffs = np.asarray(self._raw) * self._scale
        return RankingPolicy(coefficients=coeffs, assignments=tuple(self._assignments))


def _resolve_weights(config: OptimizerConfig, n: int, m: int):
    w_user = parse_weight_scheme(config.user_weights, n)
    w_item = parse_weight_scheme(config.item_weights, m) if not config.reciprocal else None
    return w_user, w_item


def _resolve_beta0(config: OptimizerConfig, n: int, m: int,
                   w_user: GgfWeights, w_item: GgfWeights | None,
                   b1: float) -> float:
    if config.beta0 is not None:
        return config.beta0
    lam = 0.0 if config.reciprocal else config.lam
    return default_beta0(n, m, config.K, w_user, w_item, lam=lam, b1=b1)


def _one_sided_engine(config: OptimizerConfig, prefs: PreferenceMatrix,
                      w_user: GgfWeights, w_item: GgfWeights):
    """Exact objective and direction-score callables for one-sided runs."""
    lam = config.lam
    kind = config.objective

    if kind == "two-sided-ggf":
        smoothing = config.variant == "smoothing"

        def value(u, v):
            return (1.0 - lam) * ggf_value(w_user, u) + lam * ggf_value(w_item, v)

        def scores(u, v, beta):
            y1 = y2 = None
            if lam < 1.0:
                y1 = moreau_grad_dual(w_user, u, beta) if smoothing \
                    else -ggf_supergradient(w_user, u)
            if lam > 0.0:
                y2 = moreau_grad_dual(w_item, v, beta) if smoothing \
                    else -ggf_supergradient(w_item, v)
            out = np.zeros((prefs.n, prefs.m))
            if y1 is not None:
                out -= (1.0 - lam) * y1[:, None] * prefs.values
            if y2 is not None:
                out -= lam * y2[None, :]
            return out

        return value, scores, True

    if kind == "welf":
        def value(u, v):
            return welf_objective(u, v, config.alpha1, config.alpha2, lam)

        def scores(u, v, beta):
            return welf_gradient_scores(prefs, u, v, config.alpha1, config.alpha2, lam)

        return value, scores, False

    if kind == "eq-exposure":
        def value(u, v):
            return eq_exposure_objective(u, v, lam)

        def scores(u, v, beta):
            return eq_exposure_gradient_scores(prefs, u, v, lam)

        return value, scores, False

    raise ValueError(f"objective {kind!r} is not a one-sided objective")


def _run_one_sided(config: OptimizerConfig, prefs: PreferenceMatrix,
                   exp: ExposureWeights):
    w_user, w_item = _resolve_weights(config, prefs.n, prefs.m)
    value_fn, scores_fn, needs_beta = _one_sided_engine(config, prefs, w_user, w_item)
    beta0 = _resolve_beta0(config, prefs.n, prefs.m, w_user, w_item, exp.b[0])

    current = deterministic_policy(prefs.values, config.K)
    u = assignment_user_utilities(current, prefs, exp)
    v = assignment_item_exposures(current, exp)
    builder = _PolicyBuilder(current)
    trace = ConvergenceTrace()
    started = time.perf_counter()

    for t in range(1, config.T + 1):
        beta_t = beta_schedule(beta0, t) if needs_beta else 0.0
        direction = deterministic_policy(scores_fn(u, v, beta_t), config.K)
        eta = 2.0 / (t + 2.0)
        builder.mix(direction, eta)
        u = (1.0 - eta) * u + eta * assignment_user_utilities(direction, prefs, exp)
        v = (1.0 - eta) * v + eta * assignment_item_exposures(direction, exp)
        if t % config.trace_every == 0 or t == config.T:
            wall = (time.perf_counter() - started) * 1e3
            trace.append(t, beta_t, value_fn(u, v), wall)
    return builder.build(), trace


def _reciprocal_engine(config: OptimizerConfig, instance: ReciprocalInstance,
                       w: GgfWeights):
    kind = config.objective
    side = instance.lam
    mu = instance.prefs.values

    if kind == "reciprocal-ggf":
        smoothing = config.variant == "smoothing"

        def value(u2):
            return ggf_value(w, u2)

        def scores(u2, beta):
            y = moreau_grad_dual(w, u2, beta) if smoothing \
                else -ggf_supergradient(w, u2)
            return reciprocal_direction_scores(y, mu, side)

        return value, scores, True

    if kind == "eq-utility":
        def value(u2):
            return eq_utility_objective(u2, config.lam)

        def scores(u2, beta):
            y = -eq_utility_dual(u2, config.lam)
            return reciprocal_direction_scores(y, mu, side)

        return value, scores, False

    raise ValueError(f"objective {kind!r} is not a reciprocal objective")


def _run_reciprocal(config: OptimizerConfig, instance: ReciprocalInstance,
                    exp: ExposureWeights):
    n = instance.prefs.n
    if config.K > n - 1:
        raise ValueError("reciprocal mode needs K <= n - 1 (no self-recommendation)")
    w = parse_weight_scheme(config.user_weights, n)
    value_fn, scores_fn, needs_beta = _reciprocal_engine(config, instance, w)
    beta0 = _resolve_beta0(config, n, n, w, None, exp.b[0])
    mu = instance.prefs.values
    side = instance.lam

    current = masked_scores_topk(mu, config.K)
    ubar = assignment_user_utilities(current, instance.prefs, exp)
    vbar = assignment_received_utilities(current, instance.prefs, exp)
    builder = _PolicyBuilder(current)
    trace = ConvergenceTrace()
    started = time.perf_counter()

    for t in range(1, config.T + 1):
        beta_t = beta_schedule(beta0, t) if needs_beta else 0.0
        u2 = 2.0 * ((1.0 - side) * ubar + side * vbar)
        direction = masked_scores_topk(scores_fn(u2, beta_t), config.K)
        eta = 2.0 / (t + 2.0)
        builder.mix(direction, eta)
        ubar = (1.0 - eta) * ubar \
            + eta * assignment_user_utilities(direction, instance.prefs, exp)
        vbar = (1.0 - eta) * vbar \
            + eta * assignment_received_utilities(direction, instance.prefs, exp)
        if t % config.trace_every == 0 or t == config.T:
            wall = (time.perf_counter() - started) * 1e3
            u2 = 2.0 * ((1.0 - side) * ubar + side * vbar)
            trace.append(t, beta_t, value_fn(u2), wall)
    return builder.build(), trace


def run_optimizer(config: OptimizerConfig, prefs: PreferenceMatrix,
                  exp: ExposureWeights) -> tuple[RankingPolicy, ConvergenceTrace]:
    """Dispatch a run according to the configured objective and mode."""
    if config.reciprocal or config.objective in ("reciprocal-ggf", "eq-utility"):
        if config.objective not in ("reciprocal-ggf", "eq-utility"):
            raise ValueError(
                f"objective {config.objective!r} does not support reciprocal mode")
        instance = ReciprocalInstance(prefs=prefs, lam=config.side_lambda)
        return _run_reciprocal(config, instance, exp)
    return _run_one_sided(config, prefs, exp)


def fw_smoothing(config: OptimizerConfig, prefs: PreferenceMatrix,
                 exp: ExposureWeights) -> tuple[RankingPolicy, ConvergenceTrace]:
    """Frank-Wolfe on the Moreau-smoothed objective (decreasing beta_t)."""
    if config.variant != "smoothing":
        raise ValueError("config.variant must be 'smoothing'")
    return run_optimizer(config, prefs, exp)


def fw_subgradient(config: OptimizerConfig, prefs: PreferenceMatrix,
                   exp: ExposureWeights) -> tuple[RankingPolicy, ConvergenceTrace]:
    """Ablation: the same loop driven by welfare supergradients."""
    if config.variant != "subgradient":
        raise ValueError("config.variant must be 'subgradient'")
    return run_optimizer(config, prefs, exp)
