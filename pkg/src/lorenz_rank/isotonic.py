"""Isotonic regression, permutahedron projection, and smoothed welfare duals.

The negated welfare value ``h(z) = -g_w(z)`` is the support function of the
permutahedron spanned by the permutations of the reversed, negated weight
vector. Its Moreau envelope is 1/beta-smooth, and the envelope gradient at
``z`` is exactly the Euclidean projection of ``z / beta`` onto that
permutahedron, computed here by sorting plus pool-adjacent-violators.

The PAV kernel is selected at import time: the compiled extension when the
build produced it, otherwise a pure-Python fallback with identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .welfare import GgfWeights, ggf_value

try:
    from . import _pavc as _pav_backend
    COMPILED_PAV = True
except ImportError:  # extension not built; the fallback is bit-compatible
    from . import _pav_py as _pav_backend
    COMPILED_PAV = False

BETA_FLOOR = 1e-12


@dataclass(frozen=True)
class MoreauParams:
    """Smoothing parameter for the envelope (trade-off smoothness/accuracy)."""

    beta: float

    def __post_init__(self):
        if not (self.beta > 0.0):
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class ProjectionResult:
    """Projection output: the projected point and PAV's pooled index blocks."""

    y: np.ndarray
    blocks: tuple[np.ndarray, ...]


def pav_nondecreasing(s: np.ndarray) -> np.ndarray:
    """Unique minimizer of 0.5 * ||x - s||^2 over nondecreasing vectors x."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 1:
        raise ValueError("input must be a vector")
    if not np.all(np.isfinite(s)):
        raise ValueError("input must be finite")
    sol, _ = _pav_backend.pav_blocks(s)
    return sol


def pav_with_blocks(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """PAV solution together with the start index of each pooled block."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    return _pav_backend.pav_blocks(s)


def reversed_negated(weights: GgfWeights) -> np.ndarray:
    """The nonincreasing vector (-w_n, ..., -w_1) spanning the permutahedron."""
    return -weights.w[::-1]


def permutahedron_project(weights: GgfWeights, z: np.ndarray) -> ProjectionResult:
    """Euclidean projection of z onto the permutahedron of reversed_negated(w).

    With sigma sorting z decreasingly (ties to lower index), the projection is
    z + x restored to the original order, where x is the nondecreasing
    least-squares fit of w_tilde - z_sigma. Note the argument order: fitting
    z_sigma - w_tilde and adding, as sometimes written, places the output on
    the wrong side of z and fails the variational characterization.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (weights.n,):
        raise ValueError(f"expected vector of length {weights.n}, got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("input must be finite")
    order = np.argsort(-z, kind="stable")
    w_tilde = reversed_negated(weights)
    x, starts = pav_with_blocks(w_tilde - z[order])
    y = z.copy()
    y[order] += x
    bounds = np.append(starts, z.shape[0])
    blocks = tuple(order[bounds[i]:bounds[i + 1]] for i in range(starts.shape[0]))
    return ProjectionResult(y=y, blocks=blocks)


def _checked_beta(beta: float) -> float:
    if not (beta > 0.0):
        raise ValueError("beta must be positive")
    return max(float(beta), BETA_FLOOR)


def moreau_grad_dual(weights: GgfWeights, z: np.ndarray, beta: float) -> np.ndarray:
    """Gradient of the Moreau envelope of -g_w at z: proj of z/beta."""
    beta = _checked_beta(beta)
    z = np.asarray(z, dtype=np.float64)
    return permutahedron_project(weights, z / beta).y


def moreau_envelope_value(weights: GgfWeights, z: np.ndarray, beta: float) -> float:
    """Envelope value via the proximal point p = z - beta * grad.

    Satisfies the sandwich  value <= -g_w(z) <= value + (beta/2) * ||w||^2.
    """
    beta = _checked_beta(beta)
    z = np.asarray(z, dtype=np.float64)
    y = moreau_grad_dual(weights, z, beta)
    prox = z - beta * y
    return -ggf_value(weights, prox) + 0.5 * beta * float(y @ y)
