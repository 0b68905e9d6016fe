"""
optilik: optimistic likelihoods over divergence, moment and Wasserstein
ambiguity sets, and posterior inference built on them.
"""

from .divergence_ball import DivergenceBall, optimistic_likelihood_divergence
from .exceptions import (
    ConfigurationError,
    DatasetError,
    InvalidInputError,
    OptilikError,
    SolverError,
)
from .inference import (
    AmbiguityFamily,
    AmbiguitySpec,
    ClassModel,
    surrogate_posterior,
    surrogate_posterior_batch,
)
from .kernel_baseline import KernelKind, KernelSpec
from .measures import DiscreteMeasure, DivergenceFamily, GroundMetric, empirical_measure
from .moment_ball import moment_summary, optimistic_likelihood_moment
from .wasserstein_ball import (
    WassersteinBall,
    batch_log_likelihood,
    optimistic_likelihood_wasserstein,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityFamily",
    "AmbiguitySpec",
    "ClassModel",
    "ConfigurationError",
    "DatasetError",
    "DiscreteMeasure",
    "DivergenceBall",
    "DivergenceFamily",
    "GroundMetric",
    "InvalidInputError",
    "KernelKind",
    "KernelSpec",
    "OptilikError",
    "SolverError",
    "WassersteinBall",
    "batch_log_likelihood",
    "empirical_measure",
    "moment_summary",
    "optimistic_likelihood_divergence",
    "optimistic_likelihood_moment",
    "optimistic_likelihood_wasserstein",
    "surrogate_posterior",
    "surrogate_posterior_batch",
]
