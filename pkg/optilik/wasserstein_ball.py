"""
Optimistic likelihood over type-1 Wasserstein balls.

For a single observation x the problem is the continuous knapsack

    max sum_j T_j  s.t.  sum_j d(x, x_j) T_j <= eps,  0 <= T_j <= w_j,

solved greedily by filling the atoms closest to x first. For a batch of
observations the optimistic log-likelihood is a concave program over the
transport polytope, solved by projected gradient ascent.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .exceptions import InvalidInputError, SolverError
from .measures import (
    DEFAULT_METRIC,
    DiscreteMeasure,
    GroundMetric,
    as_observation,
    pairwise_distances,
)

logger = logging.getLogger(__name__)

BUDGET_RTOL = 1e-12
BUDGET_ATOL = 1e-9
CAP_ATOL = 1e-12
ORACLE_MAX_ATOMS = 12

# batch solver
MAX_ASCENT_ITER = 50_000
OBJECTIVE_RTOL = 1e-10
STALL_LIMIT = 25
MIN_STEP = 1e-14
MAX_STEP = 1e12
LOG_FLOOR = 1e-300
PROJECTION_XTOL = 1e-15


@dataclass(frozen=True)
class WassersteinBall:
    """Type-1 Wasserstein ball around a discrete center."""

    center: DiscreteMeasure
    radius: float
    metric: GroundMetric = DEFAULT_METRIC

    def __post_init__(self):
        radius = float(self.radius)
        if math.isnan(radius) or radius < 0:
            raise InvalidInputError(f"negative radius: {self.radius!r}")
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "metric", GroundMetric(self.metric))

    def distances_to(self, xs) -> np.ndarray:
        """(N, L) matrix of ground distances from the atoms to ``xs``."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        return pairwise_distances(self.metric, self.center.points, xs)


@dataclass(frozen=True)
class TransportAllocation:
    """Mass moved from each atom to the observation(s).

    ``values`` is an (N,) vector for a single observation and an (N, L)
    matrix for a batch.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def is_batch(self) -> bool:
        return self.values.ndim == 2

    def received(self) -> np.ndarray:
        """Mass arriving at each observation."""
        if self.is_batch:
            return self.values.sum(axis=0)
        return np.array([self.values.sum()])

    def is_feasible(self, ball: WassersteinBall, xs) -> bool:
        """Check nonnegativity, the transport budget and the atom caps."""
        values = self.values if self.is_batch else self.values[:, None]
        dist = ball.distances_to(xs)
        if dist.shape != values.shape:
            return False
        if np.any(values < 0):
            return False
        if float(np.sum(dist * values)) > ball.radius + BUDGET_ATOL:
            return False
        return bool(np.all(values.sum(axis=1) <= ball.center.weights + CAP_ATOL))

    def to_dict(self) -> dict:
        return {"transport": self.values.tolist()}


def saturation_radius(ball: WassersteinBall, x) -> float:
    """Smallest radius at which the optimistic likelihood of x reaches 1."""
    x = as_observation(x, dimension=ball.center.dimension)
    dist = ball.distances_to(x)[:, 0]
    order = np.argsort(dist, kind="stable")
    return float(np.cumsum(dist[order] * ball.center.weights[order])[-1])


def optimistic_likelihood_wasserstein(
    ball: WassersteinBall, x
) -> Tuple[float, TransportAllocation]:
    """Greedy continuous knapsack: value and optimal allocation, O(N log N)."""
    x = as_observation(x, dimension=ball.center.dimension)
    weights = ball.center.weights
    dist = ball.distances_to(x)[:, 0]
    # stable sort breaks distance ties by ascending support index
    order = np.argsort(dist, kind="stable")
    sorted_dist = dist[order]
    sorted_weights = weights[order]
    cum_cost = np.cumsum(sorted_dist * sorted_weights)
    budget = ball.radius * (1.0 + BUDGET_RTOL)
    n_full = int(np.searchsorted(cum_cost, budget, side="right"))

    sorted_alloc = np.zeros_like(sorted_weights)
    sorted_alloc[:n_full] = sorted_weights[:n_full]
    if n_full < dist.size:
        spent = cum_cost[n_full - 1] if n_full else 0.0
        remaining = max(ball.radius - spent, 0.0)
        sorted_alloc[n_full] = min(sorted_weights[n_full], remaining / sorted_dist[n_full])
    alloc = np.empty_like(sorted_alloc)
    alloc[order] = sorted_alloc

    if n_full == dist.size:
        value = 1.0
    else:
        value = float(min(alloc.sum(), 1.0))
    return value, TransportAllocation(alloc)


def lp_oracle_single(ball: WassersteinBall, x) -> float:
    """Exact optimum of the single-observation LP by enumerating basic solutions.

    A basic optimal solution fills every atom either completely or not at all,
    except at most one atom that absorbs the remaining budget. Test-scale only.
    """
    n = ball.center.size
    if n > ORACLE_MAX_ATOMS:
        raise SolverError(
            f"oracle is test-scale only: {n} atoms exceeds {ORACLE_MAX_ATOMS}"
        )
    x = as_observation(x, dimension=ball.center.dimension)
    weights = ball.center.weights
    dist = ball.distances_to(x)[:, 0]

    masks = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)
    full_cost = masks @ (dist * weights)
    full_mass = masks @ weights
    residual = ball.radius - full_cost
    feasible = residual >= -BUDGET_RTOL * max(ball.radius, 1.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        partial = np.where(
            dist > 0,
            np.minimum(weights, np.maximum(residual, 0.0)[:, None] / np.where(dist > 0, dist, 1.0)),
            weights,
        )
    partial = np.where(masks, 0.0, partial)
    candidates = full_mass[:, None] + partial
    best = candidates[feasible].max()
    return float(min(best, 1.0))


def _project_capped_rows(y: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """Project each row of y onto {t >= 0, sum(t) <= cap}."""
    n, cols = y.shape
    u = -np.sort(-y, axis=1)
    css = np.cumsum(u, axis=1) - caps[:, None]
    ind = np.arange(1, cols + 1)
    cond = u - css / ind > 0
    rho = cols - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(n), rho] / (rho + 1)
    return np.maximum(y - np.maximum(theta, 0.0)[:, None], 0.0)


def _project_polytope(
    y: np.ndarray, dist: np.ndarray, caps: np.ndarray, eps: float
) -> np.ndarray:
    """Euclidean projection onto {T >= 0, <dist, T> <= eps, row sums <= caps}.

    The budget half-space is handled through its multiplier tau: the
    projection equals the row-wise capped projection of y - tau * dist for
    the tau at which the budget binds.
    """
    t = _project_capped_rows(y, caps)
    if float(np.sum(dist * t)) <= eps:
        return t
    positive = dist > 0
    tau_hi = float(np.max(np.where(positive, y / np.where(positive, dist, 1.0), 0.0))) + 1.0

    def excess(tau: float) -> float:
        return float(np.sum(dist * _project_capped_rows(y - tau * dist, caps))) - eps

    tau = brentq(excess, 0.0, tau_hi, xtol=PROJECTION_XTOL, maxiter=MAX_ASCENT_ITER)
    return _project_capped_rows(y - tau * dist, caps)


def _make_feasible(t: np.ndarray, dist: np.ndarray, caps: np.ndarray, eps: float) -> np.ndarray:
    """Scale an almost-feasible allocation into the polytope."""
    t = np.maximum(t, 0.0)
    rows = t.sum(axis=1)
    over = rows > caps
    t[over] *= (caps[over] / rows[over])[:, None]
    cost = float(np.sum(dist * t))
    if cost > eps:
        t *= eps / cost
    return t


def _log_objective(t: np.ndarray) -> float:
    return float(np.sum(np.log(np.maximum(t.sum(axis=0), LOG_FLOOR))))


def _batch_on_support_only(ball: WassersteinBall, dist: np.ndarray) -> Tuple[float, np.ndarray]:
    """Zero radius: each atom's mass is split evenly among the copies of it in the batch."""
    zero = dist == 0
    if not np.all(zero.any(axis=0)):
        raise SolverError("log-likelihood is −∞: an observation is off support at zero radius")
    owner = np.argmax(zero, axis=0)
    copies = np.bincount(owner, minlength=dist.shape[0])
    t = np.zeros_like(dist)
    t[owner, np.arange(dist.shape[1])] = ball.center.weights[owner] / copies[owner]
    return _log_objective(t), t


def batch_log_likelihood(ball: WassersteinBall, xs: Sequence) -> Tuple[float, TransportAllocation]:
    """max sum_l log(sum_j T_jl) over the batch transport polytope."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[0] == 0:
        raise InvalidInputError("empty observation batch")
    if xs.shape[1] != ball.center.dimension:
        raise InvalidInputError(
            f"dimension mismatch: observations have {xs.shape[1]} entries, "
            f"expected {ball.center.dimension}"
        )
    dist = ball.distances_to(xs)
    caps = np.array(ball.center.weights)
    eps = ball.radius
    if eps == 0.0:
        value, t = _batch_on_support_only(ball, dist)
        return value, TransportAllocation(t)

    n, batch = dist.shape
    delta = np.finfo(float).tiny
    init_col = eps / (batch * dist.sum(axis=0) + delta)
    t = np.minimum(caps[:, None] / batch, init_col[None, :])
    t = _make_feasible(t, dist, caps, eps)

    objective = _log_objective(t)
    step = 1.0
    stalls = 0
    for iteration in range(MAX_ASCENT_ITER):
        grad = np.broadcast_to(1.0 / np.maximum(t.sum(axis=0), LOG_FLOOR), t.shape)
        candidate = _project_polytope(t + step * grad, dist, caps, eps)
        new_objective = _log_objective(candidate)
        progress = new_objective - objective
        if progress > OBJECTIVE_RTOL * max(1.0, abs(objective)):
            stalls = 0
        else:
            stalls += 1
        if progress >= 0:
            t, objective = candidate, new_objective
            step = min(step * 2.0, MAX_STEP)
        else:
            step *= 0.5
        if stalls >= STALL_LIMIT or step < MIN_STEP:
            break
    logger.debug(
        "batch solver stopped after %d iterations, objective=%.12g", iteration + 1, objective
    )

    t = _make_feasible(t, dist, caps, eps)
    allocation = TransportAllocation(t)
    if not allocation.is_feasible(ball, xs):
        raise SolverError("batch solver returned an infeasible allocation")
    value = _log_objective(allocation.values)
    if not np.isfinite(value) or np.any(allocation.received() <= LOG_FLOOR):
        raise SolverError("log-likelihood is −∞: an observation receives no mass")
    return value, allocation
