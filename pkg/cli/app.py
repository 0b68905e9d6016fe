"""
Core application class for the optilik command line
"""

import argparse
import logging
from typing import List, Optional

from rich.console import Console

from optilik.config import config as env_config
from optilik.exceptions import ConfigurationError, OptilikError

from .commands import CommandRegistry
from .config import configure_logging
from .exceptions import EXIT_FAILURE, EXIT_USAGE, CLIError, UsageError
from .ui import UIComponents

logger = logging.getLogger(__name__)


class CLIArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on bad flags"""

    def error(self, message: str):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class CLIApp:
    """Main CLI application class"""

    def __init__(self, console: Optional[Console] = None, error_console: Optional[Console] = None):
        self.console = console or Console()
        self.error_console = error_console or Console(stderr=True)
        self.ui = UIComponents(self.console, self.error_console)
        self.command_registry = CommandRegistry()
        self._register_commands()
        self.parser = self._build_parser()

    def _register_commands(self):
        """Register all available commands"""
        from .commands.experiment import ExperimentCommand
        from .commands.help import HelpCommand
        from .commands.likelihood import LikelihoodCommand
        from .commands.posterior import PosteriorCommand

        commands = [
            HelpCommand(self.ui, self.command_registry),
            LikelihoodCommand(self.ui),
            PosteriorCommand(self.ui),
            ExperimentCommand(self.ui),
        ]

        for cmd in commands:
            self.command_registry.register(cmd)

    def _build_parser(self) -> CLIArgumentParser:
        parser = CLIArgumentParser(
            prog="optilik", description="Optimistic likelihoods, posteriors and benchmarks"
        )
        verbosity = parser.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
        verbosity.add_argument("-q", "--quiet", action="store_true", help="Errors only, no progress")
        subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CLIArgumentParser)
        for name, command in self.command_registry.commands.items():
            sub = subparsers.add_parser(
                name, aliases=command.aliases, help=command.get_description()
            )
            command.add_arguments(sub)
            sub.set_defaults(handler=command)
        return parser

    def parse(self, argv: List[str]) -> argparse.Namespace:
        try:
            return self.parser.parse_args(argv)
        except SystemExit as e:
            # --help and --version exit through argparse
            raise _ParserExit(e.code or 0) from e

    def run(self, argv: List[str]) -> int:
        """Parse ``argv``, run the command and return the process exit code"""
        try:
            args = self.parse(argv)
        except _ParserExit as e:
            return e.code
        except UsageError as e:
            self.ui.show_usage_error(str(e))
            return EXIT_USAGE

        configure_logging(verbose=args.verbose, quiet=args.quiet)
        if not env_config.validate():
            logger.warning("Ignoring invalid environment configuration: %s", env_config.to_dict())

        try:
            return args.handler.execute(args)
        except UsageError as e:
            self.ui.show_usage_error(f"{self.parser.prog} {args.command}: error: {e}")
            return EXIT_USAGE
        except ConfigurationError as e:
            self.ui.show_error(str(e))
            return EXIT_USAGE
        except (OptilikError, CLIError) as e:
            self.ui.show_error(str(e))
            return getattr(e, "exit_code", EXIT_FAILURE)
        except KeyboardInterrupt:
            self.ui.show_error("interrupted")
            return EXIT_FAILURE


class _ParserExit(Exception):
    def __init__(self, code: int):
        super().__init__(code)
        self.code = code if isinstance(code, int) else EXIT_USAGE
