"""Reciprocal recommendation: users are also the items being ranked.

Each user draws utility from two sides: the value of the profiles shown to
them, and the value others place on them when they are shown. The blended
per-user two-sided utility feeds a single rank-weighted welfare objective, so
one permutahedron projection per iteration suffices; only the linear
subproblem changes, mixing mu_ij with its transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    Assignment,
    ExposureWeights,
    PreferenceMatrix,
    RankingPolicy,
    user_utilities,
)
from .welfare import GgfWeights, ggf_value

STD_EPS = 1e-12


@dataclass(frozen=True)
class ReciprocalInstance:
    """Square mutual-preference matrix plus the side-balance lambda.

    The diagonal is forced to zero: recommending a user to themselves is
    meaningless and assignments never contain the user's own index.
    """

    prefs: PreferenceMatrix
    lam: float = 0.5

    def __post_init__(self):
        if self.prefs.n != self.prefs.m:
            raise ValueError("reciprocal instances need a square preference matrix")
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("side-balance lambda must lie in [0, 1]")
        values = self.prefs.values.copy()
        np.fill_diagonal(values, 0.0)
        object.__setattr__(self, "prefs", PreferenceMatrix(values))

    @property
    def n(self) -> int:
        return self.prefs.n


def assignment_received_utilities(assignment: Assignment, prefs: PreferenceMatrix,
                                  exp: ExposureWeights) -> np.ndarray:
    """Per-user utility from being shown to others, for one assignment.

    Entry i sums mu_ji * b_k over all users j that show i in slot k.
    """
    picked = np.take_along_axis(prefs.values, assignment.items, axis=1)
    weights = picked * exp.top[None, :]
    return np.bincount(assignment.items.ravel(), weights=weights.ravel(),
                       minlength=prefs.n)


def received_utilities(policy: RankingPolicy, prefs: PreferenceMatrix,
                       exp: ExposureWeights) -> np.ndarray:
    out = np.zeros(prefs.n)
    for coeff, assignment in zip(policy.coefficients, policy.assignments):
        out += coeff * assignment_received_utilities(assignment, prefs, exp)
    return out


def two_sided_utilities(policy: RankingPolicy, instance: ReciprocalInstance,
                        exp: ExposureWeights) -> np.ndarray:
    """Blended utilities 2 * [(1 - lam) * receiving + lam * being-shown].

    At lam = 0.5 this is exactly the sum of the two sides.
    """
    ubar = user_utilities(policy, instance.prefs, exp)
    vbar = received_utilities(policy, instance.prefs, exp)
    return 2.0 * ((1.0 - instance.lam) * ubar + instance.lam * vbar)


def reciprocal_objective(weights: GgfWeights, u: np.ndarray) -> float:
    """Single rank-weighted welfare of the two-sided utilities."""
    return ggf_value(weights, u)


def reciprocal_tradeoff_weights(n: int, tradeoff: float) -> GgfWeights:
    """Weights (1 - c) + c * (n - i + 1)/n blending total utility and equality."""
    if not (0.0 <= tradeoff <= 1.0):
        raise ValueError("tradeoff must lie in [0, 1]")
    ranks = (n - np.arange(1, n + 1) + 1.0) / n
    return GgfWeights((1.0 - tradeoff) + tradeoff * ranks)


def reciprocal_direction_scores(y: np.ndarray, mu: np.ndarray,
                                side_lam: float) -> np.ndarray:
    """Ascent scores -[(1 - lam) y_i mu_ij + lam y_j mu_ji] for the top-K step."""
    blend = (1.0 - side_lam) * y[:, None] * mu + side_lam * mu.T * y[None, :]
    return -blend


def masked_scores_topk(scores: np.ndarray, K: int) -> Assignment:
    """Per-user top-K of scores with the diagonal excluded, ties to lower index."""
    n = scores.shape[0]
    if K > n - 1:
        raise ValueError("need K <= n - 1 once self-recommendation is excluded")
    masked = np.array(scores, dtype=np.float64, copy=True)
    np.fill_diagonal(masked, -np.inf)
    order = np.argsort(-masked, axis=1, kind="stable")
    return Assignment(items=order[:, :K], m=n)


def reciprocal_update_direction(y_proj: np.ndarray, instance: ReciprocalInstance,
                                K: int) -> Assignment:
    """Linear-subproblem minimizer for the reciprocal objective."""
    scores = reciprocal_direction_scores(y_proj, instance.prefs.values, instance.lam)
    return masked_scores_topk(scores, K)


def eq_utility_objective(u: np.ndarray, lam: float) -> float:
    """Total two-sided utility minus a lam-weighted standard-deviation penalty."""
    u = np.asarray(u, dtype=np.float64)
    n = u.shape[0]
    dev = u - u.mean()
    return float(u.sum() - (lam / n) * np.sqrt(float(dev @ dev)))


def eq_utility_dual(u: np.ndarray, lam: float, eps: float = STD_EPS) -> np.ndarray:
    """Gradient of :func:`eq_utility_objective` with the kink smoothed by eps."""
    u = np.asarray(u, dtype=np.float64)
    n = u.shape[0]
    dev = u - u.mean()
    return 1.0 - (lam / n) * dev / np.sqrt(float(dev @ dev) + eps)


def eq_utility_gradient_scores(instance: ReciprocalInstance, u: np.ndarray,
                               lam: float) -> np.ndarray:
    """Ascent scores of the std-penalized objective over the policy simplex."""
    g = eq_utility_dual(u, lam)
    mu = instance.prefs.values
    return 2.0 * ((1.0 - instance.lam) * g[:, None] * mu
                  + instance.lam * mu.T * g[None, :])
