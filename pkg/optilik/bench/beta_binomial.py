"""
Beta-binomial experiment: posterior over a grid of success probabilities,
with every class likelihood replaced by a sample-based approximation, is
compared against the exact (discretized) beta posterior.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from ..exceptions import InvalidInputError
from ..inference import build_engine, posterior_from_log_likelihoods
from ..measures import GroundMetric, kl_discrete
from ..parallel import run_tasks, spawn_streams
from .report import ExperimentReport
from .schemas import BetaBinomialConfig, MethodConfig

logger = logging.getLogger(__name__)

COLUMNS = ("method", "eps_or_h", "n_i", "mean_kl")


def log_beta_pdf(theta: float, alpha: float, beta: float) -> float:
    if not 0 < theta < 1:
        raise InvalidInputError(f"theta must lie in (0, 1), got {theta!r}")
    if not (alpha > 0 and beta > 0):
        raise InvalidInputError(f"alpha and beta must be positive, got {alpha!r}, {beta!r}")
    return (alpha - 1) * math.log(theta) + (beta - 1) * math.log1p(-theta) - betaln(alpha, beta)


def beta_pdf(theta: float, alpha: float, beta: float) -> float:
    """Beta(theta | alpha, beta) with the beta function through log-gamma."""
    return math.exp(log_beta_pdf(theta, alpha, beta))


def log_binomial_pmf(x: int, trials: int, theta: float) -> float:
    if trials < 0 or not 0 <= x <= trials or int(x) != x:
        raise InvalidInputError(f"need integer 0 <= x <= M, got x={x!r}, M={trials!r}")
    if not 0 <= theta <= 1:
        raise InvalidInputError(f"theta must lie in [0, 1], got {theta!r}")
    log_choose = gammaln(trials + 1) - gammaln(x + 1) - gammaln(trials - x + 1)
    # 0^0 = 1 at the boundaries
    if (theta == 0 and x > 0) or (theta == 1 and x < trials):
        return -math.inf
    success = x * math.log(theta) if x > 0 else 0.0
    failure = (trials - x) * math.log1p(-theta) if x < trials else 0.0
    return float(log_choose + success + failure)


def binomial_pmf(x: int, trials: int, theta: float) -> float:
    """Bin(x | M, theta), evaluated in log space."""
    return math.exp(log_binomial_pmf(x, trials, theta))


def parameter_grid(size: int) -> np.ndarray:
    """Equidistant interior grid theta_i = i / (C + 1)."""
    return np.arange(1, size + 1) / (size + 1)


def discretized_posterior(grid: np.ndarray, x: int, config: BetaBinomialConfig) -> np.ndarray:
    """Beta(theta_i | x + alpha, M - x + beta), normalized over the grid."""
    a = x + config.alpha
    b = config.trials - x + config.beta
    log_density = np.array([log_beta_pdf(theta, a, b) for theta in grid])
    return np.exp(log_density - logsumexp(log_density))


def discretized_prior(grid: np.ndarray, config: BetaBinomialConfig) -> np.ndarray:
    log_density = np.array([log_beta_pdf(theta, config.alpha, config.beta) for theta in grid])
    return np.exp(log_density - logsumexp(log_density))


def _method_config(method: str, hyperparameter: float) -> MethodConfig:
    if method == "kernel-exp":
        return MethodConfig(method=method, width=hyperparameter, metric=GroundMetric.L1)
    return MethodConfig(method=method, radius=hyperparameter, metric=GroundMetric.L1)


def _repetition(config: BetaBinomialConfig, methods: Sequence[str], rng: np.random.Generator):
    """KL to the discretized posterior, indexed [method][hyper-parameter][sample size]."""
    grid = parameter_grid(config.grid_size)
    prior = discretized_prior(grid, config)
    x = int(rng.binomial(config.trials, config.theta_true))
    truth = discretized_posterior(grid, x, config)

    out = {m: np.empty((len(config.hyperparameters(m)), len(config.sample_sizes))) for m in methods}
    for s, n in enumerate(config.sample_sizes):
        samples = [rng.binomial(config.trials, theta, size=n).astype(float) for theta in grid]
        for method in methods:
            for h, value in enumerate(config.hyperparameters(method)):
                spec = _method_config(method, value).to_spec()
                log_l = [
                    build_engine(spec, cls_samples, GroundMetric.L1).log_likelihood([x])
                    for cls_samples in samples
                ]
                q_hat, _ = posterior_from_log_likelihoods(prior, log_l)
                out[method][h, s] = kl_discrete(q_hat, truth)
    return out


def run_beta_binomial(
    config: BetaBinomialConfig, method: Optional[str] = None, progress: bool = False
) -> ExperimentReport:
    """Mean KL(q_hat || discretized posterior) per (method, eps or h, N_i)."""
    methods: List[str] = [method] if method is not None else list(config.methods)
    report = ExperimentReport(
        name="beta-binomial",
        columns=COLUMNS,
        config=config.model_dump(mode="json"),
        seed=config.seed,
    )
    streams = spawn_streams(config.seed, config.repetitions)
    results = run_tasks(
        lambda rng: _repetition(config, methods, rng), streams, desc="beta-binomial", progress=progress
    )

    for m in methods:
        total = np.zeros_like(results[0][m])
        # summed in repetition order so the mean does not depend on scheduling
        for result in results:
            total += result[m]
        mean = total / config.repetitions
        for h, value in enumerate(config.hyperparameters(m)):
            for s, n in enumerate(config.sample_sizes):
                report.add(method=m, eps_or_h=value, n_i=n, mean_kl=float(mean[h, s]))
    logger.info("beta-binomial: %d repetitions, %d rows", config.repetitions, len(report.rows))
    return report


def best_by_sample_size(report: ExperimentReport) -> Dict[str, Dict[int, tuple]]:
    """For each method and N_i, the (eps or h, mean KL) with the smallest mean KL.

    Ties go to the smallest hyper-parameter.
    """
    best: Dict[str, Dict[int, tuple]] = {}
    for row in report.rows:
        per_method = best.setdefault(row["method"], {})
        current = per_method.get(row["n_i"])
        candidate = (row["eps_or_h"], row["mean_kl"])
        if (
            current is None
            or candidate[1] < current[1]
            or (candidate[1] == current[1] and candidate[0] < current[0])
        ):
            per_method[row["n_i"]] = candidate
    return best
