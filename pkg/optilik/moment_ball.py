"""
Optimistic likelihood over the mean-covariance ambiguity set.

Every measure sharing the nominal mean and covariance is admissible; the
supremum of mu(x) over that set is 1 / (1 + Mahalanobis^2(x)).
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .exceptions import InvalidInputError, SolverError
from .measures import DiscreteMeasure, as_observation, empirical_measure

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
SINGULAR_RTOL = 1e-12
DEFAULT_RIDGE = 1e-8


@dataclass(frozen=True)
class MomentSummary:
    """Mean vector and covariance matrix of a sample set."""

    mean: np.ndarray
    covariance: np.ndarray
    _factor: Tuple[np.ndarray, bool] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.atleast_2d(np.array(self.covariance, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise InvalidInputError(
                f"covariance shape {cov.shape} does not match mean of length {mean.size}"
            )
        if not np.allclose(cov, cov.T, rtol=0.0, atol=SYMMETRY_TOL):
            raise InvalidInputError("covariance matrix is not symmetric")
        try:
            factor = cho_factor(cov, lower=True)
        except LinAlgError as e:
            raise SolverError(f"covariance matrix is singular: {e}") from e
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "_factor", factor)

    @property
    def dimension(self) -> int:
        return self.mean.size

    def mahalanobis_sq(self, x) -> float:
        """(x - mean)^T covariance^{-1} (x - mean)."""
        diff = as_observation(x, dimension=self.dimension) - self.mean
        return float(diff @ cho_solve(self._factor, diff))


def default_ridge(covariance: np.ndarray) -> float:
    """Ridge added to a rank-deficient covariance."""
    m = covariance.shape[0]
    return max(DEFAULT_RIDGE, DEFAULT_RIDGE * float(np.trace(covariance)) / m)


def _regularized(cov: np.ndarray, regularization: float) -> np.ndarray:
    m = cov.shape[0]
    cov = 0.5 * (cov + cov.T) + regularization * np.eye(m)
    eigenvalues = np.linalg.eigvalsh(cov)
    if eigenvalues.min() <= SINGULAR_RTOL * np.trace(cov) / m:
        ridge = default_ridge(cov)
        logger.debug("covariance is singular, adding ridge %.3e", ridge)
        cov = cov + ridge * np.eye(m)
    return cov


def measure_moments(measure: DiscreteMeasure, regularization: float = 0.0) -> MomentSummary:
    """Mean and covariance of a discrete measure plus ``regularization * I``.

    A covariance that is still numerically singular gets the default ridge.
    """
    if regularization < 0:
        raise InvalidInputError(f"regularization must be >= 0, got {regularization!r}")
    mean = measure.weights @ measure.points
    centered = measure.points - mean
    cov = (centered * measure.weights[:, None]).T @ centered
    return MomentSummary(mean=mean, covariance=_regularized(cov, regularization))


def moment_summary(samples: Sequence, regularization: float = 0.0) -> MomentSummary:
    """Sample mean and (denominator N) covariance of ``samples``."""
    return measure_moments(empirical_measure(samples), regularization)


def optimistic_likelihood_moment(summary: MomentSummary, x) -> float:
    """sup of mu(x) over measures with the summary's mean and covariance."""
    return 1.0 / (1.0 + summary.mahalanobis_sq(x))
