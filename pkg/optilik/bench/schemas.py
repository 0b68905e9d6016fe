"""
Pydantic schemas for experiment configuration files.

Every model rejects unknown fields so that typos in JSON configs surface as
validation errors naming the offending field.
"""

import json
from pathlib import Path
from typing import List, Literal, Optional, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..exceptions import ConfigurationError
from ..inference import AmbiguityFamily, AmbiguitySpec, ConcentrationParams, LikelihoodSpec
from ..kernel_baseline import KernelKind, KernelSpec
from ..measures import GroundMetric

MethodName = Literal[
    "kl",
    "hellinger",
    "chi2",
    "tv",
    "moment",
    "wasserstein",
    "kernel-exp",
    "kernel-uni",
    "kernel-epa",
]

KERNEL_METHODS = {
    "kernel-exp": KernelKind.EXPONENTIAL,
    "kernel-uni": KernelKind.UNIFORM,
    "kernel-epa": KernelKind.EPANECHNIKOV,
}

DEFAULT_RADII = [1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0]


def is_kernel_method(method: str) -> bool:
    return method in KERNEL_METHODS


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MethodConfig(StrictModel):
    """A likelihood approximation and its hyper-parameter."""
    method: MethodName
    radius: Optional[float] = Field(None, ge=0.0, description="Ambiguity radius epsilon")
    width: Optional[float] = Field(None, gt=0.0, description="Kernel width h")
    metric: GroundMetric = Field(GroundMetric.L2, description="l1 | l2 | linf")
    regularization: float = Field(0.0, ge=0.0, description="Ridge added to the moment covariance")
    class_radii: Optional[List[float]] = Field(
        None, description="One radius per class in label order; overrides radius and tuning"
    )

    @model_validator(mode="after")
    def _check_hyperparameter(self):
        if is_kernel_method(self.method):
            if self.radius is not None:
                raise ValueError(f"{self.method} takes a width, not a radius")
            if self.class_radii is not None:
                raise ValueError(f"{self.method} takes a width, not per-class radii")
        elif self.width is not None:
            raise ValueError(f"{self.method} takes a radius, not a width")
        elif self.method == "moment":
            if self.radius is not None or self.class_radii is not None:
                raise ValueError("moment has no radius")
        if self.class_radii is not None and any(r < 0 for r in self.class_radii):
            raise ValueError("per-class radii must be nonnegative")
        return self

    @property
    def label(self) -> str:
        return self.method

    def to_spec(self, hyperparameter: Optional[float] = None) -> LikelihoodSpec:
        """Library spec; ``hyperparameter`` overrides the configured radius or width."""
        if is_kernel_method(self.method):
            width = hyperparameter if hyperparameter is not None else self.width
            if width is None:
                raise ConfigurationError(f"{self.method}: width is required")
            return KernelSpec(KERNEL_METHODS[self.method], width)
        family = AmbiguityFamily(self.method)
        if family is AmbiguityFamily.MOMENT:
            return AmbiguitySpec(family, metric=self.metric, regularization=self.regularization)
        radius = hyperparameter if hyperparameter is not None else self.radius
        if radius is None and self.class_radii:
            # placeholder; every class engine gets its own entry of class_radii
            radius = self.class_radii[0]
        if radius is None:
            raise ConfigurationError(f"{self.method}: radius is required")
        return AmbiguitySpec(family, radius=radius, metric=self.metric)


class BetaBinomialConfig(StrictModel):
    """Beta-binomial experiment on an equidistant parameter grid."""
    alpha: float = Field(1.0, gt=0.0)
    beta: float = Field(1.0, gt=0.0)
    trials: int = Field(20, ge=1, description="Binomial trials M")
    grid_size: int = Field(20, ge=2, description="Number of grid points C")
    theta_true: float = Field(0.6, gt=0.0, lt=1.0)
    sample_sizes: List[int] = Field(default_factory=lambda: [1, 2, 4, 8, 10], min_length=1)
    methods: List[Literal["kl", "wasserstein", "kernel-exp"]] = Field(
        default_factory=lambda: ["kl", "wasserstein", "kernel-exp"], min_length=1
    )
    radii: List[float] = Field(default_factory=lambda: list(DEFAULT_RADII), min_length=1)
    widths: Optional[List[float]] = Field(None, description="Kernel widths; defaults to the radii")
    repetitions: int = Field(100, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check_grids(self):
        if any(n < 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if self.widths is not None and any(h <= 0 for h in self.widths):
            raise ValueError("widths must be positive")
        return self

    def hyperparameters(self, method: str) -> List[float]:
        if method == "kernel-exp" and self.widths is not None:
            return list(self.widths)
        return list(self.radii)


class SyntheticDataConfig(StrictModel):
    kind: Literal["moons", "blobs"] = "moons"
    n_samples: int = Field(200, ge=4)
    noise: float = Field(0.1, ge=0.0)
    seed: int = 0


class ClassificationConfig(StrictModel):
    """Repeated train/test classification benchmark."""
    dataset: Optional[Path] = Field(None, description="Labeled CSV, last column is the label")
    synthetic: Optional[SyntheticDataConfig] = None
    methods: List[MethodConfig] = Field(
        default_factory=lambda: [
            MethodConfig(method="wasserstein", radius=0.1),
            MethodConfig(method="moment"),
            MethodConfig(method="kernel-exp", width=0.1),
        ],
        min_length=1,
    )
    grid: Optional[List[float]] = Field(None, description="Tuning candidates; default a*sqrt(m)*10^b")
    tune: bool = True
    folds: int = Field(5, ge=2)
    trials: int = Field(10, ge=1)
    test_fraction: float = Field(0.25, gt=0.0, lt=1.0)
    standardize: bool = False
    seed: int = 0

    @model_validator(mode="after")
    def _check_source(self):
        if (self.dataset is None) == (self.synthetic is None):
            raise ValueError("exactly one of dataset and synthetic must be given")
        return self


class CurveConfig(StrictModel):
    """Likelihood curves of several methods around one nominal measure."""
    points: List[float] = Field(default_factory=lambda: [-1.0, 1.0], min_length=1)
    weights: Optional[List[float]] = None
    methods: List[MethodConfig] = Field(
        default_factory=lambda: [
            MethodConfig(method="wasserstein", radius=0.2, metric=GroundMetric.L1),
            MethodConfig(method="kernel-exp", width=1.0, metric=GroundMetric.L1),
            MethodConfig(method="kernel-uni", width=1.0, metric=GroundMetric.L1),
            MethodConfig(method="kernel-epa", width=1.0, metric=GroundMetric.L1),
        ],
        min_length=1,
    )
    x_start: float = -3.0
    x_stop: float = 3.0
    x_step: float = Field(0.01, gt=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_range(self):
        if self.x_stop < self.x_start:
            raise ValueError("x_stop must not be smaller than x_start")
        if self.weights is not None and len(self.weights) != len(self.points):
            raise ValueError("points and weights must have the same length")
        return self


class ConsistencyConfig(StrictModel):
    """Surrogate-vs-true objective gap on a discrete toy as the sample size grows."""
    outcomes: List[float] = Field(default_factory=lambda: [0.0, 1.0, 2.0], min_length=1)
    class_pmfs: List[List[float]] = Field(
        default_factory=lambda: [[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]], min_length=2
    )
    prior: Optional[List[float]] = None
    observation: float = 1.0
    sample_sizes: List[int] = Field(default_factory=lambda: [10, 100, 1000], min_length=1)
    seeds: int = Field(50, ge=1)
    metric: GroundMetric = GroundMetric.L1
    k1: float = Field(1.0, gt=0.0)
    k2: float = Field(1.0, gt=0.0)
    a: float = Field(2.0, gt=1.0)
    confidence: float = Field(0.5, gt=0.0, lt=1.0, description="Disappointment level beta")
    seed: int = 0

    @model_validator(mode="after")
    def _check_shapes(self):
        if any(len(row) != len(self.outcomes) for row in self.class_pmfs):
            raise ValueError("every class pmf needs one entry per outcome")
        if self.prior is not None and len(self.prior) != len(self.class_pmfs):
            raise ValueError("prior needs one entry per class")
        if any(n < 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")
        return self

    def concentration(self) -> ConcentrationParams:
        return ConcentrationParams(k1=self.k1, k2=self.k2, a=self.a, beta=self.confidence, dimension=1)


ExperimentConfig = Union[BetaBinomialConfig, ClassificationConfig, CurveConfig, ConsistencyConfig]
ConfigT = TypeVar("ConfigT", bound=StrictModel)


def describe_validation_error(error: ValidationError) -> str:
    """One line per failing field: dotted path and message."""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def parse_config(model: Type[ConfigT], data: dict) -> ConfigT:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {describe_validation_error(e)}") from e


def load_config(model: Type[ConfigT], path: Union[str, Path, None]) -> ConfigT:
    """Read a JSON config file; ``None`` gives the defaults."""
    if path is None:
        return parse_config(model, {})
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"invalid JSON in {path}: line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must contain a JSON object")
    return parse_config(model, data)
