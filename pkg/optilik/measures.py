"""
Discrete probability measures, ground metrics and information-theoretic
utilities shared by all likelihood solvers.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import kl_div

from .exceptions import InvalidInputError

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-12


class GroundMetric(str, Enum):
    """p-norm ground metric d(., .) on R^m."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def scipy_name(self) -> str:
        return {"l1": "cityblock", "l2": "euclidean", "linf": "chebyshev"}[self.value]

    @property
    def norm_order(self) -> float:
        return {"l1": 1, "l2": 2, "linf": np.inf}[self.value]


DEFAULT_METRIC = GroundMetric.L2


class DivergenceFamily(str, Enum):
    """f-divergence families with their generators f."""

    KL = "kl"
    HELLINGER = "hellinger"
    CHI_SQUARED = "chi2"
    TOTAL_VARIATION = "tv"

    def generator(self, t):
        """Evaluate f(t) elementwise."""
        t = np.asarray(t, dtype=float)
        if self is DivergenceFamily.KL:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0) - t + 1.0
        if self is DivergenceFamily.HELLINGER:
            return 1.0 - np.sqrt(t)
        if self is DivergenceFamily.CHI_SQUARED:
            return (t - 1.0) ** 2
        return np.abs(t - 1.0)

    def perspective(self, p, q):
        """Evaluate q * f(p / q) elementwise, extended to q = 0 by its limit."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if self is DivergenceFamily.KL:
            return kl_div(p, q)
        if self is DivergenceFamily.HELLINGER:
            return q - np.sqrt(p * q)
        if self is DivergenceFamily.CHI_SQUARED:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(q > 0, (p - q) ** 2 / np.where(q > 0, q, 1.0), np.inf)
            return np.where((q == 0) & (p == 0), 0.0, out)
        return np.abs(p - q)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure sum_j w_j delta_{x_j}.

    Points are stored as an (N, m) array and weights as an (N,) array. Both
    arrays are read-only. Use ``from_atoms`` to merge duplicate points.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if points.ndim != 2 or points.shape[0] == 0:
            raise InvalidInputError("a discrete measure needs at least one atom")
        if points.shape[0] != weights.shape[0]:
            raise InvalidInputError(
                f"{points.shape[0]} points but {weights.shape[0]} weights"
            )
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("support points must be finite")
        if not np.all(weights > 0):
            raise InvalidInputError("weights must be strictly positive")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"weights sum to {weights.sum()!r}, expected 1")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise InvalidInputError("support points must be pairwise distinct")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_atoms(cls, points, weights) -> "DiscreteMeasure":
        """Build a measure, summing the weights of identical points.

        The first occurrence of each point fixes its position in the support.
        """
        points = np.array(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.array(weights, dtype=float).reshape(-1)
        if points.shape[0] == 0:
            raise InvalidInputError("a discrete measure needs at least one atom")
        if points.shape[0] != weights.shape[0]:
            raise InvalidInputError(
                f"{points.shape[0]} points but {weights.shape[0]} weights"
            )
        total = weights.sum()
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError(f"weights sum to {total!r}, expected 1")
        unique, first, inverse = np.unique(
            points, axis=0, return_index=True, return_inverse=True
        )
        inverse = np.asarray(inverse).reshape(-1)
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(order.size)
        merged = np.bincount(rank[inverse], weights=weights, minlength=order.size)
        # per-atom accumulation drifts with many duplicates
        return cls(points=unique[order], weights=merged / merged.sum())

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def mass_at(self, x) -> float:
        """nu(x): the weight of x if it is a support point, else 0."""
        k = support_index(self, x)
        return 0.0 if k is None else float(self.weights[k])


def as_observation(value, dimension: Optional[int] = None) -> np.ndarray:
    """Validate an observation and return it as a read-only 1-D float array."""
    x = np.array(value, dtype=float).reshape(-1)
    if x.size == 0:
        raise InvalidInputError("observation is empty")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("observation entries must be finite")
    if dimension is not None and x.size != dimension:
        raise InvalidInputError(
            f"dimension mismatch: observation has {x.size} entries, expected {dimension}"
        )
    x.setflags(write=False)
    return x


def as_probability_vector(entries) -> np.ndarray:
    """Validate a probability vector (nonnegative, sums to one)."""
    p = np.array(entries, dtype=float).reshape(-1)
    if p.size == 0:
        raise InvalidInputError("probability vector is empty")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidInputError("probability vector entries must be finite and nonnegative")
    if abs(p.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidInputError(f"probability vector sums to {p.sum()!r}, expected 1")
    p.setflags(write=False)
    return p


def empirical_measure(samples: Sequence) -> DiscreteMeasure:
    """Empirical distribution of ``samples`` with duplicates merged."""
    try:
        data = np.array(samples, dtype=float)
    except ValueError as e:
        raise InvalidInputError(f"samples have ragged dimensions: {e}") from e
    if data.size == 0 or data.shape[0] == 0:
        raise InvalidInputError("empty sample set")
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2:
        raise InvalidInputError("samples have ragged dimensions")
    n = data.shape[0]
    return DiscreteMeasure.from_atoms(data, np.full(n, 1.0 / n))


def distance(metric: GroundMetric, a, b) -> float:
    """Ground distance between two observations."""
    a = as_observation(a)
    b = as_observation(b, dimension=a.size)
    return float(np.linalg.norm(a - b, ord=GroundMetric(metric).norm_order))


def pairwise_distances(metric: GroundMetric, points, xs) -> np.ndarray:
    """Distance matrix d(points_j, xs_l) of shape (len(points), len(xs))."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if points.shape[1] != xs.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: {points.shape[1]} vs {xs.shape[1]}"
        )
    return cdist(points, xs, metric=GroundMetric(metric).scipy_name)


def support_index(center: DiscreteMeasure, x) -> Optional[int]:
    """Index of the support point exactly equal to ``x``, or None."""
    x = as_observation(x, dimension=center.dimension)
    hits = np.flatnonzero(np.all(center.points == x, axis=1))
    return int(hits[0]) if hits.size else None


def kl_discrete(p, q) -> float:
    """KL(p || q) = sum_i q_i f(p_i / q_i) with f(t) = t log t - t + 1."""
    return f_divergence(DivergenceFamily.KL, p, q)


def f_divergence(family: DivergenceFamily, p, q) -> float:
    """D_f(p || q) between two probability vectors of equal length."""
    family = DivergenceFamily(family)
    p = as_probability_vector(p)
    q = as_probability_vector(q)
    if p.size != q.size:
        raise InvalidInputError(f"length mismatch: {p.size} vs {q.size}")
    if family in (DivergenceFamily.KL, DivergenceFamily.CHI_SQUARED):
        if np.any((q == 0) & (p > 0)):
            name = "KL" if family is DivergenceFamily.KL else "chi-squared"
            raise InvalidInputError(f"{name} undefined: not absolutely continuous")
    return float(max(np.sum(family.perspective(p, q)), 0.0))
