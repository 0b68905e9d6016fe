"""
Experiment command implementation
"""

import argparse
import sys

from optilik.bench import (
    BetaBinomialConfig,
    ClassificationConfig,
    ConsistencyConfig,
    CurveConfig,
    load_config,
    run_beta_binomial,
    run_classification,
    run_consistency,
    run_curve,
    write_report,
)
from optilik.bench.report import summarize

from ..config import seed_override
from ..exceptions import EXIT_OK
from .base import BaseCommand

# name -> (config model, runner, headline metric, takes a progress flag)
EXPERIMENTS = {
    "beta-binomial": (BetaBinomialConfig, run_beta_binomial, "mean_kl", True),
    "classify": (ClassificationConfig, run_classification, "mean_auprc", True),
    "curve": (CurveConfig, run_curve, "value", False),
    "consistency": (ConsistencyConfig, run_consistency, "mean_abs_gap", True),
}


class ExperimentCommand(BaseCommand):
    """Run a benchmark experiment and write its report"""

    aliases = ["exp"]

    def get_name(self) -> str:
        return "experiment"

    def get_description(self) -> str:
        return "Run beta-binomial, classify, curve or consistency experiments"

    def get_help(self) -> str:
        return self.format_help(
            usage="experiment beta-binomial|classify|curve|consistency [--config <json>] --out <path> [--seed n]",
            description=(
                "Validate the JSON config (defaults when omitted), run the experiment and "
                "write the report. A .json path gets JSON, other suffixes CSV, no suffix both."
            ),
            examples=[
                "experiment beta-binomial --out results/beta.csv",
                "experiment curve --config fig1.json --out curve.csv",
                "experiment classify --config banknote.json --out banknote --seed 3",
            ],
        )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("experiment", choices=list(EXPERIMENTS))
        parser.add_argument("--config", help="JSON experiment configuration")
        parser.add_argument("--out", required=True, help="Report path")
        parser.add_argument("--seed", type=int, help="Override the configured seed")

    def execute(self, args: argparse.Namespace) -> int:
        model, runner, metric, has_progress = EXPERIMENTS[args.experiment]
        config = load_config(model, args.config)
        overrides = seed_override(args.seed)
        if overrides:
            config = model.model_validate({**config.model_dump(), **overrides})

        kwargs = {}
        if has_progress:
            kwargs["progress"] = not getattr(args, "quiet", False) and sys.stderr.isatty()
        report = runner(config, **kwargs)

        write_report(report, args.out)
        if getattr(args, "verbose", False):
            self.ui.show_report(report)
        self.ui.emit(summarize(report, metric))
        return EXIT_OK
