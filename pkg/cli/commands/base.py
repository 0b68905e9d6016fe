"""
Base class for all CLI commands
"""

import argparse
from abc import ABC, abstractmethod
from typing import List

from ..ui import UIComponents


class BaseCommand(ABC):
    """Base class for all CLI commands"""

    aliases: List[str] = []

    def __init__(self, ui: UIComponents):
        self.ui = ui

    @abstractmethod
    def get_name(self) -> str:
        """Return command name"""

    @abstractmethod
    def get_description(self) -> str:
        """Return command description"""

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Declare the command's flags"""

    @abstractmethod
    def execute(self, args: argparse.Namespace) -> int:
        """Execute the command and return its exit code"""

    @abstractmethod
    def get_help(self) -> str:
        """Return detailed help text"""

    def format_help(self, usage: str, description: str, examples: List[str] | None = None) -> str:
        """Format help text"""
        help_text = f"Usage: {usage}\n\n{description}"

        if examples:
            help_text += "\n\nExamples:"
            for example in examples:
                help_text += f"\n  {example}"

        return help_text
