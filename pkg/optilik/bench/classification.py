"""
Classification benchmark: repeated stratified 75/25 splits, radius or width
tuning on the training part, average precision on the held-out part.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
import tqdm
from sklearn.datasets import make_blobs, make_moons

from ..classify import LabeledDataset, TuningGrid, fit, score_model, stratified_split
from ..exceptions import DatasetError
from ..parallel import spawn_streams
from .report import ExperimentReport
from .schemas import ClassificationConfig, MethodConfig

logger = logging.getLogger(__name__)

COLUMNS = ("method", "mean_auprc", "std_auprc", "mean_hyperparameter")
SEED_BOUND = 2**32


def _read_csv(path: Union[str, Path], **kwargs) -> pd.DataFrame:
    try:
        return pd.read_csv(path, **kwargs)
    except FileNotFoundError as e:
        raise DatasetError(f"dataset not found: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise DatasetError(f"dataset {path} is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DatasetError(f"cannot parse {path}: {e}") from e


def _numeric(frame: pd.DataFrame, path, row_offset: int) -> np.ndarray:
    """Coerce every cell to float, reporting the first bad cell by row and column."""
    coerced = frame.apply(pd.to_numeric, errors="coerce")
    bad = coerced.isna().to_numpy() | ~np.isfinite(coerced.to_numpy(dtype=float))
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise DatasetError(
            f"{path}: row {row + row_offset}, column {col + 1} ({frame.columns[col]!s}): "
            f"non-numeric or non-finite value {frame.iat[row, col]!r}"
        )
    return coerced.to_numpy(dtype=float)


def load_labeled_csv(path: Union[str, Path]) -> LabeledDataset:
    """Header row, numeric feature columns, label in the last column.

    Labels are mapped to class indices in sorted order of their distinct values.
    """
    frame = _read_csv(path)
    if frame.shape[1] < 2:
        raise DatasetError(f"{path}: need at least one feature column and a label column")
    if frame.shape[0] == 0:
        raise DatasetError(f"{path}: no data rows")
    label_column = frame.iloc[:, -1]
    if label_column.isna().any():
        row = int(np.flatnonzero(label_column.isna().to_numpy())[0])
        raise DatasetError(f"{path}: row {row + 2}, column {frame.shape[1]}: missing label")
    # data rows start on line 2, after the header
    features = _numeric(frame.iloc[:, :-1], path, row_offset=2)
    names, labels = np.unique(label_column.to_numpy(), return_inverse=True)
    if names.size < 2:
        raise DatasetError(f"{path}: need at least two classes, found {names.tolist()}")
    logger.info("loaded %s: %d rows, %d features, classes %s", path, *features.shape, names.tolist())
    return LabeledDataset(features, labels.reshape(-1).astype(int), tuple(names.tolist()))


def load_samples_csv(path: Union[str, Path]) -> np.ndarray:
    """Numeric sample matrix; a non-numeric first row is taken as a header."""
    frame = _read_csv(path, header=None)
    first = frame.iloc[0].apply(pd.to_numeric, errors="coerce")
    if first.isna().any():
        frame = frame.iloc[1:]
        return _numeric(frame.reset_index(drop=True), path, row_offset=2)
    return _numeric(frame, path, row_offset=1)


def make_two_moons(n: int = 200, noise: float = 0.1, seed: int = 0) -> LabeledDataset:
    """Two interleaving half circles."""
    features, labels = make_moons(n_samples=n, noise=noise, random_state=seed)
    return LabeledDataset(features, labels.astype(int), (0, 1))


def make_two_blobs(n: int = 200, noise: float = 1.0, seed: int = 0) -> LabeledDataset:
    features, labels = make_blobs(
        n_samples=n, centers=[[-3.0, 0.0], [3.0, 0.0]], cluster_std=noise, random_state=seed
    )
    return LabeledDataset(features, labels.astype(int), (0, 1))


def load_dataset(config: ClassificationConfig) -> LabeledDataset:
    if config.dataset is not None:
        return load_labeled_csv(config.dataset)
    synthetic = config.synthetic
    maker = make_two_moons if synthetic.kind == "moons" else make_two_blobs
    return maker(synthetic.n_samples, synthetic.noise, synthetic.seed)


def _evaluate_method(
    dataset: LabeledDataset, method: MethodConfig, config: ClassificationConfig, progress: bool
):
    spec = method.to_spec()
    grid = None
    if config.tune and method.class_radii is None:
        grid = TuningGrid(tuple(config.grid)) if config.grid else TuningGrid.default(dataset.dimension)
    scores, chosen = [], []
    streams = spawn_streams(config.seed, config.trials)
    for rng in tqdm.tqdm(streams, desc=method.label, leave=False, disable=not progress):
        split_seed, fold_seed = (int(s) for s in rng.integers(SEED_BOUND, size=2))
        train, test = stratified_split(dataset.labels, config.test_fraction, split_seed)
        model = fit(
            dataset.subset(train),
            spec,
            grid=grid,
            folds=config.folds,
            seed=fold_seed,
            standardize=config.standardize,
            metric=method.metric,
            class_hyperparameters=method.class_radii,
        )
        scores.append(score_model(model, dataset.subset(test)))
        if model.hyperparameter is not None:
            chosen.append(model.hyperparameter)
        elif method.class_radii is not None:
            chosen.append(float(np.mean(method.class_radii)))
    return np.array(scores), chosen


def run_classification(config: ClassificationConfig, progress: bool = False) -> ExperimentReport:
    """Mean and standard deviation of test AUPRC (x100) per method."""
    dataset = load_dataset(config)
    if dataset.n_classes != 2:
        raise DatasetError(f"classification benchmark needs binary labels, found {dataset.n_classes} classes")
    report = ExperimentReport(
        name="classify",
        columns=COLUMNS,
        config=config.model_dump(mode="json"),
        seed=config.seed,
    )
    for method in config.methods:
        scores, chosen = _evaluate_method(dataset, method, config, progress)
        mean_h = float(np.mean(chosen)) if chosen else float("nan")
        report.add(
            method=method.label,
            mean_auprc=100.0 * float(scores.mean()),
            std_auprc=100.0 * float(scores.std()),
            mean_hyperparameter=mean_h,
        )
        logger.info("%s: mean AUPRC %.2f over %d trials", method.label, 100.0 * scores.mean(), scores.size)
    return report
