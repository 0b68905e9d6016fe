"""
Probabilistic classification with optimistic likelihoods.

Each class gets an empirical measure built from its training points, the
prior is the class frequency, and the ambiguity radius (or kernel width) is
tuned by stratified cross-validation on the average precision of the
positive-class posterior.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import average_precision_score

from .exceptions import InvalidInputError, SolverError
from .inference import (
    ClassModel,
    LikelihoodSpec,
    build_engine,
    hyperparameter_of,
    is_tunable,
    posterior_from_log_likelihoods,
    surrogate_posterior,
    with_hyperparameter,
)
from .measures import DEFAULT_METRIC, GroundMetric
from .parallel import run_tasks

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 5
TEST_FRACTION = 0.25


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with class indices in [0, C)."""

    features: np.ndarray
    labels: np.ndarray
    class_names: Tuple = field(default=())

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        if features.ndim == 1:
            features = features[:, None]
        labels = np.array(self.labels).reshape(-1)
        if features.ndim != 2 or features.shape[0] == 0:
            raise InvalidInputError("empty sample set")
        if labels.size != features.shape[0]:
            raise InvalidInputError(
                f"{features.shape[0]} feature rows but {labels.size} labels"
            )
        if not np.all(np.isfinite(features)):
            raise InvalidInputError("features must be finite")
        if not np.issubdtype(labels.dtype, np.integer):
            raise InvalidInputError("labels must be class indices")
        names = tuple(self.class_names) or tuple(range(int(labels.max()) + 1))
        if labels.min() < 0 or labels.max() >= len(names):
            raise InvalidInputError(f"labels must lie in [0, {len(names)})")
        missing = sorted(set(range(len(names))) - set(labels.tolist()))
        if missing:
            raise InvalidInputError(f"classes without members: {[names[i] for i in missing]}")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", names)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.features.shape[0]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, index) -> "LabeledDataset":
        return LabeledDataset(self.features[index], self.labels[index], self.class_names)


@dataclass(frozen=True)
class TuningGrid:
    """Ascending, positive hyper-parameter candidates."""

    candidates: Tuple[float, ...]

    def __post_init__(self):
        values = sorted({float(c) for c in self.candidates})
        if not values:
            raise InvalidInputError("tuning grid is empty")
        if values[0] <= 0 or not math.isfinite(values[-1]):
            raise InvalidInputError("tuning candidates must be positive and finite")
        object.__setattr__(self, "candidates", tuple(values))

    @classmethod
    def default(cls, dimension: int) -> "TuningGrid":
        """{a * sqrt(m) * 10^b : a = 1..9, b = -3, -2, -1}."""
        root = math.sqrt(dimension)
        return cls(tuple(a * root * 10.0**b for b in (-3, -2, -1) for a in range(1, 10)))

    def __len__(self) -> int:
        return len(self.candidates)


def auprc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Step-interpolated average precision; tied scores are ranked as one group."""
    scores = np.asarray(scores, dtype=float).reshape(-1)
    labels = np.asarray(labels, dtype=bool).reshape(-1)
    if scores.size != labels.size:
        raise InvalidInputError(f"{scores.size} scores but {labels.size} labels")
    n_positive = int(labels.sum())
    if n_positive == 0:
        raise InvalidInputError("average precision undefined: no positive labels")
    return float(average_precision_score(labels, scores))


def _require_stratifiable(labels: np.ndarray, folds: int) -> np.ndarray:
    if folds < 2:
        raise InvalidInputError(f"cannot stratify: folds must be >= 2, got {folds}")
    classes, counts = np.unique(labels, return_counts=True)
    short = classes[counts < folds]
    if short.size:
        raise InvalidInputError(
            f"cannot stratify: classes {short.tolist()} have fewer than {folds} members"
        )
    return classes


def stratified_kfold(labels: Sequence, folds: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Seeded per-class shuffle followed by a round-robin fold assignment.

    The round-robin continues across classes, so fold sizes differ by at most one.
    """
    labels = np.asarray(labels).reshape(-1)
    classes = _require_stratifiable(labels, folds)
    rng = np.random.default_rng(seed)
    assignment = np.empty(labels.size, dtype=int)
    offset = 0
    for cls in classes:
        members = rng.permutation(np.flatnonzero(labels == cls))
        assignment[members] = (offset + np.arange(members.size)) % folds
        offset += members.size
    everything = np.arange(labels.size)
    return [
        (everything[assignment != k], everything[assignment == k]) for k in range(folds)
    ]


def stratified_split(
    labels: Sequence, test_fraction: float = TEST_FRACTION, seed: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-class seeded train/test split; every class keeps a member on both sides."""
    if not 0 < test_fraction < 1:
        raise InvalidInputError(f"test fraction must lie in (0, 1), got {test_fraction!r}")
    labels = np.asarray(labels).reshape(-1)
    _require_stratifiable(labels, 2)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == cls))
        n_test = min(max(1, int(round(test_fraction * members.size))), members.size - 1)
        test.append(members[:n_test])
        train.append(members[n_test:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def _standardization(features: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


def _build_model(
    dataset: LabeledDataset,
    spec: LikelihoodSpec,
    metric: GroundMetric,
    standardize: bool,
    class_hyperparameters: Optional[Sequence[float]] = None,
) -> ClassModel:
    mean = scale = None
    features = dataset.features
    if standardize:
        mean, scale = _standardization(features)
        features = (features - mean) / scale
    counts = dataset.class_counts()
    if class_hyperparameters is None:
        specs = [spec] * dataset.n_classes
        hyperparameter = hyperparameter_of(spec)
    else:
        specs = [with_hyperparameter(spec, value) for value in class_hyperparameters]
        hyperparameter = None
    engines = tuple(
        build_engine(specs[i], features[dataset.labels == i], metric) for i in range(dataset.n_classes)
    )
    return ClassModel(
        labels=dataset.class_names,
        prior=counts / counts.sum(),
        engines=engines,
        hyperparameter=hyperparameter,
        feature_mean=mean,
        feature_scale=scale,
    )


def predict_proba(model: ClassModel, x) -> np.ndarray:
    """Surrogate posterior over the model's classes at x."""
    posterior, _ = surrogate_posterior(model, x)
    return posterior


def _posterior_or_prior(model: ClassModel, x) -> np.ndarray:
    try:
        return posterior_from_log_likelihoods(model.prior, model.log_likelihoods(x))[0]
    except SolverError:
        # no class explains x at this hyper-parameter
        return np.array(model.prior)


def posterior_matrix(model: ClassModel, xs) -> np.ndarray:
    """(n, C) posteriors; points with zero evidence get the prior."""
    return np.array([_posterior_or_prior(model, x) for x in np.atleast_2d(xs)])


def score_model(model: ClassModel, dataset: LabeledDataset) -> float:
    """AUPRC of the positive-class posterior; one-vs-rest mean when C > 2."""
    posteriors = posterior_matrix(model, dataset.features)
    if dataset.n_classes == 2:
        return auprc(posteriors[:, 1], dataset.labels == 1)
    present = np.unique(dataset.labels)
    return float(np.mean([auprc(posteriors[:, c], dataset.labels == c) for c in present]))


def fit(
    dataset: LabeledDataset,
    spec: LikelihoodSpec,
    grid: Optional[TuningGrid] = None,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    standardize: bool = False,
    metric: GroundMetric = DEFAULT_METRIC,
    class_hyperparameters: Optional[Sequence[float]] = None,
) -> ClassModel:
    """Fit one likelihood engine per class, tuning the shared hyper-parameter on ``grid``.

    ``metric`` is the ground metric of kernel specs. ``class_hyperparameters``
    fixes one radius (or width) per class in class order and skips tuning.
    """
    if dataset.n_classes < 2:
        raise InvalidInputError("at least two classes are required")

    if class_hyperparameters is not None:
        values = [float(v) for v in class_hyperparameters]
        if len(values) != dataset.n_classes:
            raise InvalidInputError(
                f"{len(values)} per-class hyper-parameters for {dataset.n_classes} classes"
            )
        if not is_tunable(spec):
            raise InvalidInputError("moment sets take no per-class hyper-parameters")
        if grid is not None:
            logger.info("per-class hyper-parameters given, skipping tuning")
        return _build_model(dataset, spec, metric, standardize, values)

    if grid is None or not is_tunable(spec):
        if grid is not None:
            logger.info("%s has no hyper-parameter to tune", spec)
        return _build_model(dataset, spec, metric, standardize)
    if len(grid) == 1:
        return _build_model(dataset, with_hyperparameter(spec, grid.candidates[0]), metric, standardize)

    splits = stratified_kfold(dataset.labels, folds, seed)
    tasks = [(c, f) for c in range(len(grid)) for f in range(len(splits))]

    def evaluate(task: Tuple[int, int]) -> float:
        c, f = task
        train, valid = splits[f]
        candidate = with_hyperparameter(spec, grid.candidates[c])
        model = _build_model(dataset.subset(train), candidate, metric, standardize)
        return score_model(model, dataset.subset(valid))

    scores = np.array(run_tasks(evaluate, tasks)).reshape(len(grid), len(splits))
    means = scores.mean(axis=1)
    # argmax picks the first, i.e. smallest, of tied candidates
    best = int(np.argmax(means))
    chosen = grid.candidates[best]
    logger.info("selected hyper-parameter %.6g with mean validation AUPRC %.6f", chosen, means[best])
    for candidate, score in zip(grid.candidates, means):
        logger.debug("candidate %.6g: mean AUPRC %.6f", candidate, score)

    model = _build_model(dataset, with_hyperparameter(spec, chosen), metric, standardize)
    return ClassModel(
        labels=model.labels,
        prior=model.prior,
        engines=model.engines,
        hyperparameter=chosen,
        feature_mean=model.feature_mean,
        feature_scale=model.feature_scale,
        cv_scores=tuple(zip(grid.candidates, means.tolist())),
    )
