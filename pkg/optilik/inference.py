"""
Posterior inference with optimistic likelihoods.

Replacing the intractable likelihood p(x | theta_i) in the evidence lower
bound by an optimistic likelihood L_i gives the surrogate problem

    min_{q in simplex}  sum_i q_i (log q_i - log pi_i) - sum_i q_i log L_i,

whose minimizer over the full simplex is q_i = pi_i L_i / sum_k pi_k L_k with
optimal value -log sum_k pi_k L_k.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .divergence_ball import DivergenceBall, optimistic_likelihood_divergence
from .exceptions import InvalidInputError, SolverError
from .kernel_baseline import KernelSpec, kernel_likelihood, kernel_log_likelihood
from .measures import (
    DEFAULT_METRIC,
    DiscreteMeasure,
    DivergenceFamily,
    GroundMetric,
    as_observation,
    as_probability_vector,
    empirical_measure,
)
from .moment_ball import MomentSummary, measure_moments, optimistic_likelihood_moment
from .parallel import run_tasks, spawn_streams
from .wasserstein_ball import (
    WassersteinBall,
    batch_log_likelihood,
    optimistic_likelihood_wasserstein,
)

logger = logging.getLogger(__name__)


class AmbiguityFamily(str, Enum):
    KL = "kl"
    HELLINGER = "hellinger"
    CHI_SQUARED = "chi2"
    TOTAL_VARIATION = "tv"
    MOMENT = "moment"
    WASSERSTEIN = "wasserstein"

    @property
    def divergence(self) -> Optional[DivergenceFamily]:
        try:
            return DivergenceFamily(self.value)
        except ValueError:
            return None


@dataclass(frozen=True)
class AmbiguitySpec:
    """Ambiguity set family with its radius and ground metric."""

    family: AmbiguityFamily
    radius: float = 0.0
    metric: GroundMetric = DEFAULT_METRIC
    regularization: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", AmbiguityFamily(self.family))
        object.__setattr__(self, "metric", GroundMetric(self.metric))
        radius = float(self.radius)
        if math.isnan(radius) or radius < 0:
            raise InvalidInputError(f"negative radius: {self.radius!r}")
        object.__setattr__(self, "radius", radius)


LikelihoodSpec = Union[AmbiguitySpec, KernelSpec]


def is_tunable(spec: LikelihoodSpec) -> bool:
    """Moment sets have no hyper-parameter; every other spec has one."""
    return not (isinstance(spec, AmbiguitySpec) and spec.family is AmbiguityFamily.MOMENT)


def hyperparameter_of(spec: LikelihoodSpec) -> Optional[float]:
    if isinstance(spec, KernelSpec):
        return spec.width
    return spec.radius if is_tunable(spec) else None


def with_hyperparameter(spec: LikelihoodSpec, value: float) -> LikelihoodSpec:
    """Copy of ``spec`` with its radius (or kernel width) replaced."""
    if isinstance(spec, KernelSpec):
        return replace(spec, width=value)
    if not is_tunable(spec):
        return spec
    return replace(spec, radius=value)


class LikelihoodEngine(ABC):
    """Likelihood approximation fitted to the samples of one class."""

    @abstractmethod
    def likelihood(self, x) -> float:
        """Approximate likelihood of a single observation."""

    def log_likelihood(self, x) -> float:
        value = self.likelihood(x)
        return math.log(value) if value > 0 else -math.inf

    def log_likelihood_batch(self, xs) -> float:
        """Joint log-likelihood of a batch of observations."""
        return float(sum(self.log_likelihood(x) for x in np.atleast_2d(xs)))


class DivergenceEngine(LikelihoodEngine):
    def __init__(self, ball: DivergenceBall):
        self.ball = ball

    def likelihood(self, x) -> float:
        return optimistic_likelihood_divergence(self.ball, x)


class MomentEngine(LikelihoodEngine):
    def __init__(self, summary: MomentSummary):
        self.summary = summary

    def likelihood(self, x) -> float:
        return optimistic_likelihood_moment(self.summary, x)

    def log_likelihood(self, x) -> float:
        return -math.log1p(self.summary.mahalanobis_sq(x))


class WassersteinEngine(LikelihoodEngine):
    def __init__(self, ball: WassersteinBall):
        self.ball = ball

    def likelihood(self, x) -> float:
        value, _ = optimistic_likelihood_wasserstein(self.ball, x)
        return value

    def log_likelihood_batch(self, xs) -> float:
        try:
            value, _ = batch_log_likelihood(self.ball, xs)
        except SolverError as e:
            logger.debug("batch log-likelihood is -inf: %s", e)
            return -math.inf
        return value


class KernelEngine(LikelihoodEngine):
    def __init__(self, spec: KernelSpec, center: DiscreteMeasure, metric: GroundMetric):
        self.spec = spec
        self.center = center
        self.metric = GroundMetric(metric)

    def likelihood(self, x) -> float:
        return kernel_likelihood(self.spec, self.center, self.metric, x)

    def log_likelihood(self, x) -> float:
        return kernel_log_likelihood(self.spec, self.center, self.metric, x)


def engine_for_measure(
    spec: LikelihoodSpec, center: DiscreteMeasure, metric: GroundMetric = DEFAULT_METRIC
) -> LikelihoodEngine:
    """Likelihood engine described by ``spec`` around the nominal measure ``center``.

    ``metric`` is only consulted for kernel specs; ambiguity specs carry their own.
    """
    if isinstance(spec, KernelSpec):
        return KernelEngine(spec, center, metric)
    if spec.family is AmbiguityFamily.MOMENT:
        return MomentEngine(measure_moments(center, spec.regularization))
    if spec.family is AmbiguityFamily.WASSERSTEIN:
        return WassersteinEngine(WassersteinBall(center, spec.radius, spec.metric))
    return DivergenceEngine(DivergenceBall(spec.family.divergence, center, spec.radius))


def build_engine(
    spec: LikelihoodSpec, samples, metric: GroundMetric = DEFAULT_METRIC
) -> LikelihoodEngine:
    """Fit the likelihood engine described by ``spec`` to one class's samples."""
    return engine_for_measure(spec, empirical_measure(samples), metric)


@dataclass(frozen=True)
class ClassModel:
    """Finite parameter set with prior and one likelihood engine per class."""

    labels: Tuple
    prior: np.ndarray
    engines: Tuple[LikelihoodEngine, ...]
    hyperparameter: Optional[float] = None
    feature_mean: Optional[np.ndarray] = None
    feature_scale: Optional[np.ndarray] = None
    cv_scores: Tuple[Tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        labels = tuple(self.labels)
        prior = as_probability_vector(self.prior)
        engines = tuple(self.engines)
        if len(labels) < 2:
            raise InvalidInputError(f"at least two classes are required, got {len(labels)}")
        if not (len(labels) == prior.size == len(engines)):
            raise InvalidInputError(
                f"{len(labels)} labels, {prior.size} prior entries and {len(engines)} engines"
            )
        if np.any(prior <= 0):
            raise InvalidInputError("prior must be strictly positive")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "engines", engines)

    @property
    def n_classes(self) -> int:
        return len(self.labels)

    def prepare(self, x) -> np.ndarray:
        """Apply the feature standardization the model was fitted with."""
        x = as_observation(x)
        if self.feature_mean is not None:
            x = (x - self.feature_mean) / self.feature_scale
        return x

    def log_likelihoods(self, x) -> np.ndarray:
        x = self.prepare(x)
        return np.array([engine.log_likelihood(x) for engine in self.engines])


def posterior_from_log_likelihoods(prior, log_likelihoods) -> Tuple[np.ndarray, float]:
    """Closed-form surrogate posterior and optimal value from log L_i.

    Classes with log L_i = -inf receive zero posterior mass.
    """
    prior = as_probability_vector(prior)
    log_l = np.asarray(log_likelihoods, dtype=float).reshape(-1)
    if log_l.size != prior.size:
        raise InvalidInputError(f"{log_l.size} likelihoods for {prior.size} classes")
    if np.any(np.isnan(log_l)) or np.any(log_l == np.inf):
        raise InvalidInputError("log-likelihoods must be finite or -inf")
    with np.errstate(divide="ignore"):
        joint = np.log(prior) + log_l
    if np.all(joint == -np.inf):
        raise SolverError("posterior undefined: zero evidence")
    log_evidence = float(logsumexp(joint))
    posterior = np.exp(joint - log_evidence)
    posterior /= posterior.sum()
    return posterior, -log_evidence


def posterior_from_likelihoods(prior, likelihoods) -> Tuple[np.ndarray, float]:
    """Same as ``posterior_from_log_likelihoods`` for likelihood values L_i >= 0."""
    values = np.asarray(likelihoods, dtype=float).reshape(-1)
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise InvalidInputError("likelihoods must be finite and nonnegative")
    with np.errstate(divide="ignore"):
        return posterior_from_log_likelihoods(prior, np.log(values))


def surrogate_posterior(model: ClassModel, x) -> Tuple[np.ndarray, float]:
    """Posterior q and surrogate objective value J for a single observation."""
    return posterior_from_log_likelihoods(model.prior, model.log_likelihoods(x))


def surrogate_posterior_batch(model: ClassModel, xs) -> Tuple[np.ndarray, float]:
    """Posterior for a batch of observations, using joint optimistic log-likelihoods."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    prepared = np.array([model.prepare(x) for x in xs])
    log_l = np.array([engine.log_likelihood_batch(prepared) for engine in model.engines])
    return posterior_from_log_likelihoods(model.prior, log_l)


def elbo_objective(q, prior, log_likelihoods) -> float:
    """sum_i q_i (log q_i - log pi_i) - sum_i q_i log L_i with 0 log 0 = 0."""
    q = as_probability_vector(q)
    prior = as_probability_vector(prior)
    log_l = np.asarray(log_likelihoods, dtype=float).reshape(-1)
    if not (q.size == prior.size == log_l.size):
        raise InvalidInputError(
            f"length mismatch: q {q.size}, prior {prior.size}, log-likelihoods {log_l.size}"
        )
    active = q > 0
    if np.any(prior[active] == 0):
        raise InvalidInputError("q is not absolutely continuous with respect to the prior")
    qa = q[active]
    return float(np.sum(qa * (np.log(qa) - np.log(prior[active]) - log_l[active])))


@dataclass(frozen=True)
class ConcentrationParams:
    """Constants of the light-tail concentration bound behind the radius formula."""

    k1: float
    k2: float
    a: float
    beta: float
    dimension: int

    def __post_init__(self):
        if not self.k1 > 0 or not self.k2 > 0:
            raise InvalidInputError("k1 and k2 must be positive")
        if not self.a > 1:
            raise InvalidInputError(f"exponent a must exceed 1, got {self.a!r}")
        if not 0 < self.beta < 1:
            raise InvalidInputError(f"confidence beta must lie in (0, 1), got {self.beta!r}")
        if self.dimension < 1:
            raise InvalidInputError(f"dimension must be >= 1, got {self.dimension!r}")


def wasserstein_radius(params: ConcentrationParams, n_classes: int, n_samples: int) -> float:
    """Radius making the disappointment at most beta with n_samples per class.

    The formula is not available in dimension 2.
    """
    if params.dimension == 2:
        raise InvalidInputError("radius formula excludes dimension m = 2")
    if n_samples < 1:
        raise InvalidInputError(f"sample size must be >= 1, got {n_samples!r}")
    if n_classes < 1:
        raise InvalidInputError(f"class count must be >= 1, got {n_classes!r}")
    threshold = math.log(params.k1 * n_classes / params.beta) / params.k2
    if threshold <= 0:
        return 0.0
    base = threshold / n_samples
    if n_samples >= threshold:
        return base ** (1.0 / max(params.dimension, 2))
    return base ** (1.0 / params.a)


def radius_schedule(
    params: ConcentrationParams, n_classes: int, sample_sizes: Sequence[int]
) -> list:
    return [wasserstein_radius(params, n_classes, n) for n in sample_sizes]


@dataclass(frozen=True)
class DiscreteSimulator:
    """Classes with known pmfs over a finite outcome set.

    ``spec`` fixes the ambiguity family and metric; radii are supplied per class.
    """

    outcomes: np.ndarray
    class_pmfs: np.ndarray
    prior: np.ndarray
    observation: np.ndarray
    sample_size: int
    spec: AmbiguitySpec

    def __post_init__(self):
        outcomes = np.array(self.outcomes, dtype=float)
        if outcomes.ndim == 1:
            outcomes = outcomes[:, None]
        pmfs = np.atleast_2d(np.array(self.class_pmfs, dtype=float))
        if pmfs.shape[1] != outcomes.shape[0]:
            raise InvalidInputError(
                f"pmfs over {pmfs.shape[1]} outcomes but {outcomes.shape[0]} outcomes given"
            )
        for row in pmfs:
            as_probability_vector(row)
        prior = as_probability_vector(self.prior)
        if prior.size != pmfs.shape[0]:
            raise InvalidInputError(f"{prior.size} prior entries for {pmfs.shape[0]} classes")
        if self.sample_size < 1:
            raise InvalidInputError(f"sample size must be >= 1, got {self.sample_size!r}")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "class_pmfs", pmfs)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(
            self, "observation", as_observation(self.observation, dimension=outcomes.shape[1])
        )

    @property
    def n_classes(self) -> int:
        return self.class_pmfs.shape[0]

    def sample(self, class_index: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.choice(self.outcomes.shape[0], size=self.sample_size, p=self.class_pmfs[class_index])
        return self.outcomes[idx]

    def true_likelihoods(self) -> np.ndarray:
        """p(x | theta_i) at the simulator's observation."""
        hit = np.all(self.outcomes == self.observation, axis=1)
        return self.class_pmfs[:, hit].sum(axis=1)

    def true_objective(self) -> float:
        """Optimal ELBO-form value with the exact likelihoods."""
        return posterior_from_likelihoods(self.prior, self.true_likelihoods())[1]


def simulate_objectives(
    simulator: DiscreteSimulator, radii: Sequence[float], rng: np.random.Generator
) -> Tuple[float, float]:
    """Draw fresh samples and return (surrogate value, true value)."""
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (simulator.n_classes,))
    log_l = []
    for i in range(simulator.n_classes):
        samples = simulator.sample(i, rng)
        engine = build_engine(replace(simulator.spec, radius=float(radii[i])), samples)
        log_l.append(engine.log_likelihood(simulator.observation))
    try:
        _, j_hat = posterior_from_log_likelihoods(simulator.prior, log_l)
    except SolverError:
        j_hat = math.inf
    return j_hat, simulator.true_objective()


def disappointment_rate(
    simulator: DiscreteSimulator, radii: Sequence[float], trials: int, seed: int
) -> float:
    """Monte-Carlo estimate of P(J_true < J_hat)."""
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials!r}")

    def worker(rng: np.random.Generator) -> bool:
        j_hat, j_true = simulate_objectives(simulator, radii, rng)
        return j_true < j_hat

    outcomes = run_tasks(worker, spawn_streams(seed, trials))
    rate = sum(outcomes) / trials
    logger.info("disappointment rate %.4f over %d trials", rate, trials)
    return rate
