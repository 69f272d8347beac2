"""Recover n outcome probabilities from n-1 collective power moments.

For an n-level observable L with eigenvalues lambda_i, the averages
``<L^p> = sum_i p_i lambda_i^p`` for p = 1..n-1 together with
``sum_i p_i = 1`` form a Vandermonde system in the probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InconsistentMomentsError, InvalidArgument, SingularSystemError

CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class QuditSpec:
    levels: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        probs = tuple(float(x) for x in self.probs)
        if len(levels) != len(probs) or len(levels) < 2:
            raise InvalidArgument("need matching levels and probs with at least two entries")
        if len(set(levels)) != len(levels):
            raise SingularSystemError("eigenvalues must be pairwise distinct")
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise InvalidArgument("probs must be non-negative and sum to 1")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "probs", probs)


def moments_from_probs(spec: QuditSpec) -> np.ndarray:
    lam = np.asarray(spec.levels)
    p = np.asarray(spec.probs)
    return np.array([np.dot(p, lam**k) for k in range(1, lam.size)])


def solve_vandermonde(nodes: Sequence[float], rhs: Sequence[float]) -> np.ndarray:
    """Solve ``sum_i x_i nodes_i^k = rhs_k`` (k = 0..n-1) by Bjorck-Pereyra elimination.

    O(n^2) work; typically far more accurate than a generic LU solve when
    the nodes cluster.
    """
    x = np.asarray(nodes, dtype=float)
    b = np.array(rhs, dtype=float)
    n = x.size - 1
    if b.size != x.size:
        raise InvalidArgument(f"expected {x.size} right-hand-side entries, got {b.size}")
    if np.unique(x).size != x.size:
        raise SingularSystemError("repeated eigenvalues make the moment system singular")
    for k in range(n):
        b[k + 1 :] = b[k + 1 :] - x[k] * b[k:n]
    for k in range(n - 1, -1, -1):
        b[k + 1 :] = b[k + 1 :] / (x[k + 1 :] - x[: n - k])
        b[k:n] = b[k:n] - b[k + 1 :]
    return b


def vandermonde_condition(levels: Sequence[float]) -> float:
    lam = np.asarray(levels, dtype=float)
    v = np.vander(lam, increasing=True).T
    return float(np.linalg.cond(v))


@dataclass(frozen=True)
class MomentInversion:
    probs: np.ndarray
    condition: float
    clamp: float  # magnitude of the largest negative component set to zero


def invert_moments(levels: Sequence[float], moments: Sequence[float]) -> MomentInversion:
    lam = np.asarray(levels, dtype=float)
    m = np.asarray(moments, dtype=float)
    if m.size != lam.size - 1:
        raise InvalidArgument(f"expected {lam.size - 1} moments for {lam.size} levels, got {m.size}")
    p = solve_vandermonde(lam, np.concatenate([[1.0], m]))
    worst = int(np.argmin(p))
    if p[worst] < -CLAMP_TOL:
        raise InconsistentMomentsError(worst, float(p[worst]))
    clamp = float(max(0.0, -p[worst]))
    if clamp > 0:
        p = np.clip(p, 0.0, None)
        p = p / p.sum()
    return MomentInversion(p, vandermonde_condition(lam), clamp)


def probs_from_moments(levels: Sequence[float], moments: Sequence[float]) -> np.ndarray:
    return invert_moments(levels, moments).probs


def collective_moments(counts: Sequence[int], levels: Sequence[float]) -> np.ndarray:
    """Sample averages of ``L, L^2, ..., L^(n-1)`` given per-level counts n_i."""
    c = np.asarray(counts, dtype=float)
    lam = np.asarray(levels, dtype=float)
    total = c.sum()
    if total <= 0:
        raise InvalidArgument("counts must contain at least one sample")
    return np.array([np.dot(c, lam**k) / total for k in range(1, lam.size)])
