"""
Flag parsing helpers: turn command-line values into library configuration
"""

import argparse
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from rich.console import Console
from rich.logging import RichHandler

from optilik.bench.schemas import MethodConfig, parse_config
from optilik.config import config as env_config
from optilik.exceptions import ConfigurationError

from .exceptions import UsageError

METHOD_CHOICES = [
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
METRIC_CHOICES = ["l1", "l2", "linf"]


@dataclass
class CliConfig:
    """Options shared by the likelihood and posterior commands"""
    method: MethodConfig
    x: np.ndarray

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        return cls(
            method=method_from_args(args),
            x=parse_vector(args.x),
        )


def parse_vector(text: str) -> np.ndarray:
    """Parse a comma-separated vector such as ``0.5,-1``."""
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as e:
        raise UsageError(f"--x expects comma-separated numbers, got {text!r}") from e
    if not values or not np.all(np.isfinite(values)):
        raise UsageError(f"--x expects finite numbers, got {text!r}")
    return np.array(values)


def method_from_args(args: argparse.Namespace) -> MethodConfig:
    """Validate the method flags; a missing radius or width is a usage error."""
    data = {"method": args.method, "metric": args.metric, "regularization": args.regularization}
    if args.radius is not None:
        data["radius"] = args.radius
    if args.width is not None:
        data["width"] = args.width
    try:
        method = parse_config(MethodConfig, data)
        method.to_spec()
    except ConfigurationError as e:
        raise UsageError(str(e)) from e
    return method


def add_method_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x", required=True, help="Observation as comma-separated numbers")
    parser.add_argument("--method", required=True, choices=METHOD_CHOICES)
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--radius", type=float, help="Ambiguity radius epsilon")
    group.add_argument("--width", type=float, help="Kernel width h")
    parser.add_argument("--metric", default="l2", choices=METRIC_CHOICES, help="Ground metric")
    parser.add_argument(
        "--regularization", type=float, default=0.0, help="Ridge added to the moment covariance"
    )


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Route log records through a single RichHandler on stderr."""
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    else:
        level = env_config.log_level_value
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_time=False, show_path=verbose)],
        force=True,
    )


def seed_override(seed: Optional[int]) -> dict:
    return {} if seed is None else {"seed": seed}
