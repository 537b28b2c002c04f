"""Generalized Gini welfare: OWA evaluation, weight schemes, Lorenz machinery.

A welfare vector ``w`` with ``w_1 = 1 >= ... >= w_n >= 0`` applied to the
ascending sort of a utility vector defines a concave, rank-weighted welfare
value. The equivalent Lorenz-space weights ``w'_i = w_i - w_{i+1}`` are
nonnegative and sum to one, so every admissible ``w`` is a weighting of the
points of the generalized Lorenz curve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

DOMINANCE_TOL = 1e-9


@dataclass(frozen=True)
class GgfWeights:
    """Non-increasing rank weights with w_1 = 1."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] < 1:
            raise ValueError("weights must be a nonempty vector")
        if abs(w[0] - 1.0) > 1e-12:
            raise ValueError("leading weight must equal 1")
        if np.any(np.diff(w) > 1e-12) or w[-1] < -1e-12:
            raise ValueError("weights must be non-increasing and nonnegative")
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def lorenz_weights(self) -> np.ndarray:
        """w'_i = w_i - w_{i+1} (convention w_{n+1} = 0); sums to w_1 = 1."""
        return self.w - np.append(self.w[1:], 0.0)

    def norm(self) -> float:
        return float(np.linalg.norm(self.w))


def uniform_weights(n: int) -> GgfWeights:
    """All-ones weights: welfare equals total utility."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return GgfWeights(np.ones(n))


def gini_weights(n: int) -> GgfWeights:
    """Classical Gini-index weights w_i = (n - i + 1) / n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return GgfWeights((n - np.arange(1, n + 1) + 1.0) / n)


def bonferroni_weights(n: int) -> GgfWeights:
    """Bonferroni-index weights, rescaled so the leading weight is 1.

    The raw weights are w_i = (1/n) * sum_{l=i..n} 1/l; positive rescaling
    does not change the maximizers of the welfare value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tail = np.cumsum((1.0 / np.arange(1, n + 1))[::-1])[::-1] / n
    return GgfWeights(tail / tail[0])


def quantile_owa_weights(n: int, q: float, omega: float) -> GgfWeights:
    """Weights trading total utility against the q-quantile cumulative utility.

    In Lorenz space, mass ``omega`` sits at index floor(q n) and ``1 - omega``
    at index n (the two merge when floor(q n) = n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 <= omega <= 1.0):
        raise ValueError("omega must lie in [0, 1]")
    k = int(np.floor(q * n))
    if k < 1:
        raise ValueError(f"quantile index floor(q*n) = {k} must be >= 1")
    k = min(k, n)
    lorenz = np.zeros(n)
    lorenz[k - 1] += omega
    lorenz[n - 1] += 1.0 - omega
    return lorenz_to_owa(lorenz)


def lorenz_to_owa(lorenz: np.ndarray) -> GgfWeights:
    """Invert Lorenz-space weights into rank weights via w_i = sum_{l>=i} w'_l."""
    lorenz = np.asarray(lorenz, dtype=np.float64)
    if lorenz.min() < -1e-12:
        raise ValueError("Lorenz weights must be nonnegative")
    if abs(lorenz.sum() - 1.0) > 1e-12:
        raise ValueError("Lorenz weights must sum to 1")
    return GgfWeights(np.cumsum(lorenz[::-1])[::-1])


def ggf_value(weights: GgfWeights, x: np.ndarray) -> float:
    """Rank-weighted welfare: dot product of w with x sorted ascending."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (weights.n,):
        raise ValueError(f"expected vector of length {weights.n}, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("utilities must be finite")
    return float(weights.w @ np.sort(x))


def ggf_supergradient(weights: GgfWeights, x: np.ndarray) -> np.ndarray:
    """Supergradient s with s_i = w_{rank of x_i ascending}, ties by index."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (weights.n,):
        raise ValueError(f"expected vector of length {weights.n}, got {x.shape}")
    s = np.empty_like(weights.w)
    s[np.argsort(x, kind="stable")] = weights.w
    return s


def lorenz_curve(x: np.ndarray) -> np.ndarray:
    """Generalized Lorenz curve: cumulative sums of the ascending sort."""
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("utilities must be finite")
    return np.cumsum(np.sort(x))


class Dominance(enum.Enum):
    STRICT_DOMINATES = "strict_dominates"
    WEAKLY_DOMINATES = "weakly_dominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"
    WEAKLY_DOMINATED = "weakly_dominated"
    STRICTLY_DOMINATED = "strictly_dominated"


def lorenz_dominance(x: np.ndarray, other: np.ndarray,
                     tol: float = DOMINANCE_TOL) -> Dominance:
    """Compare generalized Lorenz curves of two utility vectors.

    Strictness requires exceeding the other curve somewhere by more than
    ``tol``; curves within ``tol`` everywhere compare as equal.
    """
    x = np.asarray(x, dtype=np.float64)
    other = np.asarray(other, dtype=np.float64)
    if x.shape != other.shape:
        raise ValueError("vectors must have equal length")
    diff = lorenz_curve(x) - lorenz_curve(other)
    if np.max(np.abs(diff)) <= tol:
        return Dominance.EQUAL
    ge_all = bool(np.all(diff >= -tol))
    le_all = bool(np.all(diff <= tol))
    if ge_all:
        if np.any(diff > tol):
            return Dominance.STRICT_DOMINATES
        return Dominance.WEAKLY_DOMINATES
    if le_all:
        if np.any(diff < -tol):
            return Dominance.STRICTLY_DOMINATED
        return Dominance.WEAKLY_DOMINATED
    return Dominance.INCOMPARABLE


def weakly_lorenz_dominates(x: np.ndarray, other: np.ndarray,
                            tol: float = DOMINANCE_TOL) -> bool:
    """True when the curve of ``x`` is nowhere below that of ``other`` - tol."""
    diff = lorenz_curve(np.asarray(x, dtype=np.float64)) - \
        lorenz_curve(np.asarray(other, dtype=np.float64))
    return bool(np.all(diff >= -tol))


def strictly_lorenz_dominates(x: np.ndarray, other: np.ndarray,
                              tol: float = DOMINANCE_TOL) -> bool:
    diff = lorenz_curve(np.asarray(x, dtype=np.float64)) - \
        lorenz_curve(np.asarray(other, dtype=np.float64))
    return bool(np.all(diff >= -tol) and np.any(diff > tol))


def gini_index(x: np.ndarray) -> float:
    """Standard discrete Gini index, zero for constant vectors.

    Computed as G = 1 + 1/n - 2 * (sum_i X_i) / (n * sum x) from the
    generalized Lorenz curve X; equals the mean-normalized average of
    absolute pairwise differences.
    """
    x = np.asarray(x, dtype=np.float64)
    total = float(x.sum())
    if total <= 0.0:
        raise ValueError("Gini index requires a positive total")
    n = x.shape[0]
    curve = lorenz_curve(x)
    return 1.0 + 1.0 / n - 2.0 * float(curve.sum()) / (n * total)


def two_sided_objective(lam: float, w_user: GgfWeights, w_item: GgfWeights,
                        u: np.ndarray, v: np.ndarray) -> float:
    """Welfare blend (1 - lam) * g_{w_user}(u) + lam * g_{w_item}(v)."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError("lambda must lie in [0, 1]")
    return (1.0 - lam) * ggf_value(w_user, u) + lam * ggf_value(w_item, v)


def parse_weight_scheme(spec: str, n: int) -> GgfWeights:
    """Build weights from a scheme string.

    Accepted forms: ``gini``, ``bonferroni``, ``uniform``,
    ``quantile:q=<f>,omega=<f>`` and ``explicit:<comma separated floats>``.
    """
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "gini":
        return gini_weights(n)
    if name == "bonferroni":
        return bonferroni_weights(n)
    if name == "uniform":
        return uniform_weights(n)
    if name == "quantile":
        params = {}
        for part in args.split(","):
            key, _, value = part.partition("=")
            if key.strip() not in ("q", "omega") or not value:
                raise ValueError(f"bad quantile parameter {part!r} in scheme {spec!r}")
            params[key.strip()] = float(value)
        if set(params) != {"q", "omega"}:
            raise ValueError(f"quantile scheme needs q and omega, got {spec!r}")
        return quantile_owa_weights(n, params["q"], params["omega"])
    if name == "explicit":
        values = np.array([float(t) for t in args.split(",") if t.strip()])
        if values.shape[0] != n:
            raise ValueError(f"explicit scheme has {values.shape[0]} weights, expected {n}")
        return GgfWeights(values)
    raise ValueError(f"unknown weight scheme {spec!r}")
