"""Domain types for preferences, exposure models and sparse ranking policies.

A stochastic ranking policy is kept in sparse form: a convex combination of
deterministic top-K assignments. Dense per-user bistochastic views are only
materialized on demand by :func:`reconstruct_dense` (tests and debugging).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MERIT_EPS = 1e-9


@dataclass(frozen=True)
class PreferenceMatrix:
    """Dense n x m matrix of affinity scores in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("preference matrix must be 2-d with n, m >= 1")
        if not np.all(np.isfinite(values)):
            raise ValueError("preference values must be finite")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("preference values must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ExposureWeights:
    """Position examination probabilities b_1 >= ... >= b_K > 0, zero beyond K."""

    m: int
    K: int
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.float64)
        if not (1 <= self.K <= self.m):
            raise ValueError(f"require 1 <= K <= m, got K={self.K}, m={self.m}")
        if b.shape != (self.m,):
            raise ValueError(f"b must have length m={self.m}")
        top = b[: self.K]
        if top[-1] <= 0.0 or np.any(np.diff(top) > 0.0):
            raise ValueError("examination weights must be non-increasing and positive up to K")
        if np.any(b[self.K :] != 0.0):
            raise ValueError("examination weights must vanish beyond position K")
        object.__setattr__(self, "b", b)

    @property
    def top(self) -> np.ndarray:
        """The K active weights (positions beyond K carry no exposure)."""
        return self.b[: self.K]


def dcg_exposure_weights(m: int, K: int) -> ExposureWeights:
    """Discounted-cumulative-gain examination weights b_k = 1/log2(1+k)."""
    if not (1 <= K <= m):
        raise ValueError(f"require 1 <= K <= m, got K={K}, m={m}")
    b = np.zeros(m)
    b[:K] = 1.0 / np.log2(1.0 + np.arange(1, K + 1))
    return ExposureWeights(m=m, K=K, b=b)


@dataclass(frozen=True)
class Assignment:
    """Per-user ranked top-K lists: items[i, k] is shown to user i in slot k."""

    items: np.ndarray  # (n, K) integer array, 0-based item indices
    m: int

    def __post_init__(self):
        items = np.asarray(self.items, dtype=np.int64)
        if items.ndim != 2:
            raise ValueError("assignment must be an (n, K) array")
        if items.size and (items.min() < 0 or items.max() >= self.m):
            raise ValueError("item index out of range")
        for row in items:
            if len(set(row.tolist())) != row.shape[0]:
                raise ValueError("duplicate item in a user's ranked list")
        object.__setattr__(self, "items", items)

    @property
    def n(self) -> int:
        return self.items.shape[0]

    @property
    def K(self) -> int:
        return self.items.shape[1]


@dataclass(frozen=True)
class RankingPolicy:
    """Sparse convex combination of deterministic assignments (BvN form)."""

    coefficients: np.ndarray
    assignments: tuple[Assignment, ...]

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.shape[0] != len(self.assignments):
            raise ValueError("one coefficient per assignment required")
        if coeffs.size == 0:
            raise ValueError("policy must have at least one component")
        if coeffs.min() <= 0.0:
            raise ValueError("coefficients must be strictly positive")
        if abs(coeffs.sum() - 1.0) > 1e-12:
            raise ValueError("coefficients must sum to 1 within 1e-12")
        first = self.assignments[0]
        for assignment in self.assignments:
            if assignment.items.shape != first.items.shape or assignment.m != first.m:
                raise ValueError("all components must share the same (n, K, m)")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "assignments", tuple(self.assignments))

    @property
    def n(self) -> int:
        return self.assignments[0].n

    @property
    def K(self) -> int:
        return self.assignments[0].K

    @property
    def m(self) -> int:
        return self.assignments[0].m

    @classmethod
    def deterministic(cls, assignment: Assignment) -> "RankingPolicy":
        return cls(coefficients=np.array([1.0]), assignments=(assignment,))


@dataclass(frozen=True)
class UtilityProfile:
    """Realized user utilities and item exposures of a policy."""

    user_utilities: np.ndarray
    item_exposures: np.ndarray

    def check_conservation(self, exp: ExposureWeights, n: int, tol_scale: float = 1e-9):
        total = float(self.item_exposures.sum())
        expect = n * float(exp.top.sum())
        if abs(total - expect) > tol_scale * n * exp.K:
            raise AssertionError(f"exposure not conserved: {total} vs {expect}")


def deterministic_policy(scores: np.ndarray, K: int) -> Assignment:
    """Top-K assignment sorting each user's scores decreasingly, ties to lower index."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2:
        raise ValueError("scores must be an (n, m) array")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    if not (1 <= K <= scores.shape[1]):
        raise ValueError(f"require 1 <= K <= m, got K={K}, m={scores.shape[1]}")
    # stable argsort of -scores: decreasing values, lower index wins ties
    order = np.argsort(-scores, axis=1, kind="stable")
    return Assignment(items=order[:, :K], m=scores.shape[1])


def assignment_user_utilities(assignment: Assignment, prefs: PreferenceMatrix,
                              exp: ExposureWeights) -> np.ndarray:
    picked = np.take_along_axis(prefs.values, assignment.items, axis=1)
    return picked @ exp.top


def assignment_item_exposures(assignment: Assignment, exp: ExposureWeights) -> np.ndarray:
    weights = np.tile(exp.top, assignment.n)
    return np.bincount(assignment.items.ravel(), weights=weights, minlength=assignment.m)


def user_utilities(policy: RankingPolicy, prefs: PreferenceMatrix,
                   exp: ExposureWeights) -> np.ndarray:
    """Expected per-user utility of the policy mixture (linear in components)."""
    if prefs.n != policy.n or prefs.m != policy.m or exp.m != policy.m:
        raise ValueError("policy, preferences and exposure dimensions disagree")
    u = np.zeros(policy.n)
    for coeff, assignment in zip(policy.coefficients, policy.assignments):
        u += coeff * assignment_user_utilities(assignment, prefs, exp)
    return u


def item_exposures(policy: RankingPolicy, exp: ExposureWeights) -> np.ndarray:
    """Expected per-item exposure of the policy mixture."""
    if exp.m != policy.m:
        raise ValueError("policy and exposure dimensions disagree")
    v = np.zeros(policy.m)
    for coeff, assignment in zip(policy.coefficients, policy.assignments):
        v += coeff * assignment_item_exposures(assignment, exp)
    return v


def utility_profile(policy: RankingPolicy, prefs: PreferenceMatrix,
                    exp: ExposureWeights) -> UtilityProfile:
    return UtilityProfile(
        user_utilities=user_utilities(policy, prefs, exp),
        item_exposures=item_exposures(policy, exp),
    )


def merit_weighted_exposures(v: np.ndarray, prefs: PreferenceMatrix) -> np.ndarray:
    """Exposure divided by item merit q_j = sum_i mu_ij, floored at MERIT_EPS."""
    merit = prefs.values.sum(axis=0)
    return np.asarray(v, dtype=np.float64) / np.maximum(merit, MERIT_EPS)


def reconstruct_dense(policy: RankingPolicy, user: int) -> np.ndarray:
    """Dense m x K slot-assignment matrix for one user (column-stochastic)."""
    if not (0 <= user < policy.n):
        raise ValueError(f"user index {user} out of range")
    dense = np.zeros((policy.m, policy.K))
    for coeff, assignment in zip(policy.coefficients, policy.assignments):
        dense[assignment.items[user], np.arange(policy.K)] += coeff
    return dense
