"""
Help command implementation
"""

import argparse

from ..exceptions import EXIT_OK, UsageError
from ..ui import UIComponents
from .base import BaseCommand


class HelpCommand(BaseCommand):
    """Show help information"""

    def __init__(self, ui: UIComponents, registry):
        super().__init__(ui)
        self.registry = registry

    def get_name(self) -> str:
        return "help"

    def get_description(self) -> str:
        return "Show available commands and usage"

    def get_help(self) -> str:
        return self.format_help(
            usage="help [command]",
            description="Show help information for all commands or a specific command.",
            examples=["help", "help likelihood", "help experiment"],
        )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("topic", nargs="?", help="Command to describe")

    def execute(self, args: argparse.Namespace) -> int:
        if args.topic:
            command = self.registry.get_command(args.topic)
            if command is None:
                raise UsageError(f"Unknown command: {args.topic}")
            self.ui.show_command_help(command.get_name(), command.get_description(), command.get_help())
        else:
            self.ui.show_commands(self.registry.descriptions())
        return EXIT_OK
