"""
Posterior command implementation
"""

import argparse

import numpy as np

from optilik.bench.classification import load_labeled_csv
from optilik.classify import fit
from optilik.inference import posterior_from_log_likelihoods

from ..config import CliConfig, add_method_arguments
from ..exceptions import EXIT_OK
from .base import BaseCommand


class PosteriorCommand(BaseCommand):
    """Surrogate posterior over the classes of a labeled dataset"""

    def get_name(self) -> str:
        return "posterior"

    def get_description(self) -> str:
        return "Posterior over classes with optimistic class likelihoods"

    def get_help(self) -> str:
        return self.format_help(
            usage="posterior --data <labeled csv> --x <vector> --method <method> [--radius eps | --width h]",
            description=(
                "Fit one likelihood per class (prior = class frequencies) and print JSON "
                "with labels, prior, likelihoods, posterior and objective."
            ),
            examples=[
                "posterior --data toy.csv --x 0 --method wasserstein --radius 0.1",
                "posterior --data banknote.csv --x 1.2,3.4,-0.5,0.1 --method moment",
            ],
        )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", required=True, help="CSV with a header and the label last")
        add_method_arguments(parser)
        parser.add_argument(
            "--standardize", action="store_true", help="z-score features before fitting"
        )

    def execute(self, args: argparse.Namespace) -> int:
        options = CliConfig.from_args(args)
        dataset = load_labeled_csv(args.data)
        model = fit(
            dataset,
            options.method.to_spec(),
            standardize=args.standardize,
            metric=options.method.metric,
        )
        log_likelihoods = model.log_likelihoods(options.x)
        posterior, objective = posterior_from_log_likelihoods(model.prior, log_likelihoods)
        self.ui.emit_json(
            {
                "labels": list(model.labels),
                "prior": model.prior,
                "likelihoods": np.exp(log_likelihoods),
                "posterior": posterior,
                "objective": objective,
            }
        )
        return EXIT_OK
