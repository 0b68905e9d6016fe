"""
User interface components
"""

import json
import math
from typing import Any, Iterable

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from optilik.bench.report import ExperimentReport, format_number


def plain(value: Any) -> Any:
    """JSON-ready copy of ``value`` with floats capped at 12 significant digits."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if hasattr(value, "tolist"):
        return plain(value.tolist())
    if isinstance(value, float):
        return float(format_number(value)) if math.isfinite(value) else None
    return value


class UIComponents:
    """Console output of the command line; results on stdout, diagnostics on stderr"""

    def __init__(self, console: Console, error_console: Console):
        self.console = console
        self.error_console = error_console

    def emit(self, text: str):
        """Print machine-readable output without markup or wrapping"""
        self.console.print(text, markup=False, highlight=False, soft_wrap=True)

    def emit_number(self, value: float):
        self.emit(format_number(value))

    def emit_json(self, payload: Any):
        self.emit(json.dumps(plain(payload)))

    def show_error(self, message: str):
        self.error_console.print(f"[red]Error:[/red] {escape(message)}", highlight=False, soft_wrap=True)

    def show_usage_error(self, message: str):
        self.error_console.print(message, markup=False, highlight=False, soft_wrap=True)

    def show_report(self, report: ExperimentReport, limit: int = 20):
        """Show the first rows of a report as a table on stderr"""
        table = Table(title=report.name)
        for column in report.columns:
            table.add_column(column, style="cyan")
        for row in report.rows[:limit]:
            table.add_row(*(self._cell(row[c]) for c in report.columns))
        if len(report.rows) > limit:
            table.caption = f"{len(report.rows) - limit} more rows"
        self.error_console.print(table)

    def show_commands(self, commands: Iterable[tuple]):
        table = Table(title="Available Commands")
        table.add_column("Command", style="cyan")
        table.add_column("Description", style="green")
        for name, description in commands:
            table.add_row(name, description)
        self.console.print(table)

    def show_command_help(self, command_name: str, description: str, help_text: str):
        """Show help for a specific command"""
        help_content = f"{command_name}\n\n[green]{description}[/green]\n\n{help_text}"
        self.console.print(Panel(help_content, title=f"Help: {command_name}", border_style="green"))

    @staticmethod
    def _cell(value: Any) -> str:
        return format_number(value) if isinstance(value, float) else str(value)

