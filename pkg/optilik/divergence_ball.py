"""
Optimistic likelihood over f-divergence balls

    B_f(nu, eps) = { mu : D_f(nu || mu) <= eps }

around a discrete nominal measure. Off the support of the nominal measure the
optimal value has a closed form that depends only on eps. On the support the
problem is a finite convex program; the optimum spreads the mass not placed
at x proportionally to the nominal weights, which reduces the program to a
monotone equation in a single scalar.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .exceptions import InvalidInputError, SolverError
from .measures import DiscreteMeasure, DivergenceFamily, support_index

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-12
MAX_BISECTION_ITER = 200
# Smallest fraction of the off-atom mass that is kept away from x.
MIN_MASS_FRACTION = 1e-300


@dataclass(frozen=True)
class DivergenceBall:
    """f-divergence ball around a discrete center."""

    family: DivergenceFamily
    center: DiscreteMeasure
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "family", DivergenceFamily(self.family))
        radius = float(self.radius)
        if math.isnan(radius) or radius < 0:
            raise InvalidInputError(f"negative radius: {self.radius!r}")
        object.__setattr__(self, "radius", radius)


def off_support_value(family: DivergenceFamily, eps: float) -> float:
    """Optimistic likelihood of any point outside the nominal support."""
    family = DivergenceFamily(family)
    if eps < 0:
        raise InvalidInputError(f"negative radius: {eps!r}")
    if family is DivergenceFamily.KL:
        return 1.0 - math.exp(-eps)
    if family is DivergenceFamily.HELLINGER:
        # the distance is bounded by 1, larger radii admit every measure
        if eps >= 1.0:
            return 1.0
        return 1.0 - (1.0 - eps) ** 2
    if family is DivergenceFamily.CHI_SQUARED:
        return 1.0 - 1.0 / (1.0 + eps)
    return min(eps / 2.0, 1.0)


def _mass_at_x(nominal_k: float, rest: float) -> float:
    """Mass left at x when ``rest`` is kept off x; exactly nu_k when nothing moves."""
    return nominal_k + ((1.0 - nominal_k) - rest)


def _reduced_divergence(family: DivergenceFamily, nominal_k: float, rest: float) -> float:
    """Divergence of the measure with mass ``rest`` spread proportionally off x."""
    other = 1.0 - nominal_k
    return float(
        family.perspective(other, rest) + family.perspective(nominal_k, _mass_at_x(nominal_k, rest))
    )


def _smallest_feasible_rest(family: DivergenceFamily, nominal_k: float, eps: float) -> float:
    """Smallest mass s kept off x such that the reduced divergence is <= eps.

    The reduced divergence is convex in s, vanishes at s = 1 - nu_k and is
    decreasing on [0, 1 - nu_k], so the feasible set is an interval [s*, 1 - nu_k].
    """
    other = 1.0 - nominal_k
    if other <= 0.0:
        return 0.0
    if family is DivergenceFamily.TOTAL_VARIATION:
        return max(other - eps / 2.0, 0.0)
    if _reduced_divergence(family, nominal_k, 0.0) <= eps:
        return 0.0
    lower = other * MIN_MASS_FRACTION
    if _reduced_divergence(family, nominal_k, lower) <= eps:
        return lower

    def gap(s: float) -> float:
        return _reduced_divergence(family, nominal_k, s) - eps

    if gap(other) >= 0:
        return other
    try:
        rest, result = brentq(
            gap,
            lower,
            other,
            xtol=BISECTION_TOL * other,
            rtol=4 * np.finfo(float).eps,
            maxiter=MAX_BISECTION_ITER,
            full_output=True,
        )
    except (RuntimeError, ValueError) as e:
        raise SolverError(f"on-support {family.value} solver failed: {e}") from e
    logger.debug(
        "%s on-support root: s=%.3e after %d iterations", family.value, rest, result.iterations
    )
    # move to the feasible side of the root
    step = BISECTION_TOL * other
    for _ in range(16):
        if gap(rest) <= 0:
            break
        rest = min(other, rest + step)
        step *= 2.0
    return rest


def optimal_measure_on_support(
    family: DivergenceFamily, center: DiscreteMeasure, eps: float, k: int
) -> np.ndarray:
    """Weights y of an optimal measure when x is the k-th support point."""
    family = DivergenceFamily(family)
    if eps < 0:
        raise InvalidInputError(f"negative radius: {eps!r}")
    if not 0 <= k < center.size:
        raise InvalidInputError(f"support index {k} out of range for {center.size} atoms")
    weights = center.weights
    nominal_k = float(weights[k])
    if eps == 0.0:
        return np.array(weights)
    rest = _smallest_feasible_rest(family, nominal_k, eps)
    other = 1.0 - nominal_k
    y = np.zeros(center.size)
    if other > 0.0:
        y[:] = weights * (rest / other)
    y[k] = _mass_at_x(nominal_k, rest)
    return y


def solve_on_support(
    family: DivergenceFamily, center: DiscreteMeasure, eps: float, k: int
) -> float:
    """max y_k subject to D_f(nu || y) <= eps over the simplex, x = x_k."""
    y = optimal_measure_on_support(family, center, eps, k)
    return float(min(max(y[k], 0.0), 1.0))


def solve_on_support_kl(center: DiscreteMeasure, eps: float, k: int) -> float:
    """KL version of ``solve_on_support``."""
    return solve_on_support(DivergenceFamily.KL, center, eps, k)


def optimistic_likelihood_divergence(ball: DivergenceBall, x) -> float:
    """sup of mu(x) over the divergence ball."""
    k: Optional[int] = support_index(ball.center, x)
    if k is None:
        return off_support_value(ball.family, ball.radius)
    if ball.radius == 0.0:
        return float(ball.center.weights[k])
    return solve_on_support(ball.family, ball.center, ball.radius, k)
