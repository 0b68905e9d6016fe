"""
Experiment harnesses: beta-binomial inference, classification benchmarks,
likelihood curves and the consistency study.
"""

from .beta_binomial import (
    beta_pdf,
    best_by_sample_size,
    binomial_pmf,
    run_beta_binomial,
)
from .classification import (
    load_labeled_csv,
    load_samples_csv,
    make_two_blobs,
    make_two_moons,
    run_classification,
)
from .consistency import run_consistency
from .curves import likelihood_curve, nominal_measure, run_curve, x_grid
from .report import ExperimentReport, format_number, write_report
from .schemas import (
    BetaBinomialConfig,
    ClassificationConfig,
    ConsistencyConfig,
    CurveConfig,
    MethodConfig,
    load_config,
)

__all__ = [
    "BetaBinomialConfig",
    "ClassificationConfig",
    "ConsistencyConfig",
    "CurveConfig",
    "ExperimentReport",
    "MethodConfig",
    "best_by_sample_size",
    "beta_pdf",
    "binomial_pmf",
    "format_number",
    "likelihood_curve",
    "load_config",
    "load_labeled_csv",
    "load_samples_csv",
    "make_two_blobs",
    "make_two_moons",
    "nominal_measure",
    "run_beta_binomial",
    "run_classification",
    "run_consistency",
    "run_curve",
    "write_report",
    "x_grid",
]
