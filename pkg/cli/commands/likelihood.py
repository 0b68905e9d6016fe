"""
Likelihood command implementation
"""

import argparse
import logging

from optilik.bench.classification import load_samples_csv
from optilik.inference import WassersteinEngine, build_engine
from optilik.wasserstein_ball import optimistic_likelihood_wasserstein

from ..config import CliConfig, add_method_arguments
from ..exceptions import EXIT_OK, UsageError
from .base import BaseCommand

logger = logging.getLogger(__name__)


class LikelihoodCommand(BaseCommand):
    """Evaluate one optimistic (or kernel) likelihood"""

    aliases = ["lik"]

    def get_name(self) -> str:
        return "likelihood"

    def get_description(self) -> str:
        return "Optimistic likelihood of an observation around a sample set"

    def get_help(self) -> str:
        return self.format_help(
            usage=(
                "likelihood --samples <csv> --x <vector> --method <method> "
                "[--radius eps | --width h] [--metric l1|l2|linf] [--emit-transport]"
            ),
            description=(
                "Print the likelihood value of x. With --emit-transport a Wasserstein "
                "run also prints the optimal transport as JSON."
            ),
            examples=[
                "likelihood --samples atoms.csv --x 0 --method wasserstein --radius 0.2",
                "likelihood --samples atoms.csv --x 0.5,1 --method moment",
                "likelihood --samples atoms.csv --x 3 --method kernel-exp --width 1 --metric l1",
            ],
        )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--samples", required=True, help="CSV of samples, one row per sample")
        add_method_arguments(parser)
        parser.add_argument(
            "--emit-transport",
            action="store_true",
            help="Also print the optimal transport (wasserstein only)",
        )

    def execute(self, args: argparse.Namespace) -> int:
        options = CliConfig.from_args(args)
        if args.emit_transport and options.method.method != "wasserstein":
            raise UsageError("--emit-transport requires --method wasserstein")
        samples = load_samples_csv(args.samples)
        engine = build_engine(options.method.to_spec(), samples, options.method.metric)
        logger.debug("evaluating %s at x=%s", options.method.method, options.x.tolist())

        if isinstance(engine, WassersteinEngine):
            value, transport = optimistic_likelihood_wasserstein(engine.ball, options.x)
            self.ui.emit_number(value)
            if args.emit_transport:
                self.ui.emit_json(transport.to_dict())
        else:
            self.ui.emit_number(engine.likelihood(options.x))
        return EXIT_OK
