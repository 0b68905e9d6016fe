"""
Likelihood curves of several approximations over a 1-D grid
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..exceptions import InvalidInputError
from ..inference import engine_for_measure
from ..measures import DiscreteMeasure
from .report import ExperimentReport
from .schemas import CurveConfig, MethodConfig

logger = logging.getLogger(__name__)

COLUMNS = ("method", "x", "value")


def x_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid start, start + step, ..., stop without accumulated drift."""
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def nominal_measure(points: Sequence[float], weights: Optional[Sequence[float]] = None) -> DiscreteMeasure:
    points = np.asarray(points, dtype=float)
    if weights is None:
        weights = np.full(points.shape[0], 1.0 / points.shape[0])
    return DiscreteMeasure.from_atoms(points, weights)


def likelihood_curve(
    center: DiscreteMeasure,
    methods: Sequence[MethodConfig],
    xs: Sequence[float],
    report: Optional[ExperimentReport] = None,
) -> ExperimentReport:
    """Rows (method, x, value) of each method's likelihood over ``xs``."""
    if center.dimension != 1:
        raise InvalidInputError(f"curves need a 1-D support, got dimension {center.dimension}")
    if report is None:
        report = ExperimentReport(name="curve", columns=COLUMNS, config={}, seed=0)
    for method in methods:
        engine = engine_for_measure(method.to_spec(), center, method.metric)
        for x in xs:
            report.add(method=method.label, x=float(x), value=engine.likelihood([x]))
    logger.debug("tabulated %d methods over %d points", len(methods), len(xs))
    return report


def run_curve(config: CurveConfig) -> ExperimentReport:
    report = ExperimentReport(
        name="curve", columns=COLUMNS, config=config.model_dump(mode="json"), seed=config.seed
    )
    center = nominal_measure(config.points, config.weights)
    xs = x_grid(config.x_start, config.x_stop, config.x_step)
    return likelihood_curve(center, config.methods, xs, report)
