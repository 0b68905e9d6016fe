"""
Sample-average kernel approximations of the likelihood,

    p(x) ~ sum_j w_j K(d(x, x_j) / h),

used as baselines for the optimistic likelihoods. These are likelihood
scores, no density normalization is applied.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from .exceptions import InvalidInputError
from .measures import DiscreteMeasure, GroundMetric, as_observation, pairwise_distances


class KernelKind(str, Enum):
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    EPANECHNIKOV = "epanechnikov"

    def __call__(self, y):
        """Kernel profile K(y), elementwise."""
        y = np.asarray(y, dtype=float)
        if self is KernelKind.EXPONENTIAL:
            return np.exp(-y)
        inside = np.abs(y) <= 1.0
        if self is KernelKind.UNIFORM:
            return inside.astype(float)
        return np.where(inside, 0.75 * (1.0 - y**2), 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel profile and width h > 0."""

    kind: KernelKind
    width: float

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        width = float(self.width)
        if not width > 0 or math.isinf(width):
            raise InvalidInputError(f"kernel width must be positive, got {self.width!r}")
        object.__setattr__(self, "width", width)


def _scaled_distances(spec: KernelSpec, center: DiscreteMeasure, metric: GroundMetric, x):
    x = as_observation(x, dimension=center.dimension)
    return pairwise_distances(metric, center.points, x)[:, 0] / spec.width


def kernel_likelihood(spec: KernelSpec, center: DiscreteMeasure, metric: GroundMetric, x) -> float:
    """sum_j w_j K(d(x, x_j) / h)."""
    y = _scaled_distances(spec, center, metric, x)
    return float(np.dot(center.weights, spec.kind(y)))


def kernel_log_likelihood(
    spec: KernelSpec, center: DiscreteMeasure, metric: GroundMetric, x
) -> float:
    """Logarithm of ``kernel_likelihood``; stays finite for the exponential kernel."""
    y = _scaled_distances(spec, center, metric, x)
    if spec.kind is KernelKind.EXPONENTIAL:
        return float(logsumexp(-y, b=center.weights))
    value = float(np.dot(center.weights, spec.kind(y)))
    return math.log(value) if value > 0 else -math.inf
