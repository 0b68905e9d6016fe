"""
Experiment reports and their CSV / JSON writers
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import pandas as pd

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"


def format_number(value: float) -> str:
    """Shortest round-trip decimal, capped at 12 significant digits."""
    return format(float(value), f".{SIGNIFICANT_DIGITS}g")


def _rounded(value: Any) -> Any:
    if isinstance(value, float):
        # JSON has no NaN or infinity
        return float(format_number(value)) if math.isfinite(value) else None
    return value


@dataclass
class ExperimentReport:
    """Long-format result rows of one experiment.

    ``columns`` fixes the CSV header; the JSON output repeats ``seed`` and
    ``config`` on every row.
    """

    name: str
    columns: Tuple[str, ...]
    config: Dict[str, Any]
    seed: int
    rows: List[Dict[str, Any]] = field(default_factory=list)

    def add(self, **values) -> None:
        missing = set(self.columns) - set(values)
        if missing:
            raise KeyError(f"row is missing columns {sorted(missing)}")
        self.rows.append({column: values[column] for column in self.columns})

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=list(self.columns))

    def to_records(self) -> List[Dict[str, Any]]:
        return [
            {**{k: _rounded(v) for k, v in row.items()}, "seed": self.seed, "config": self.config}
            for row in self.rows
        ]

    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]

    def where(self, **criteria) -> List[Dict[str, Any]]:
        return [row for row in self.rows if all(row[k] == v for k, v in criteria.items())]


def write_csv(report: ExperimentReport, path: Path) -> None:
    report.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def write_json(report: ExperimentReport, path: Path) -> None:
    path.write_text(json.dumps(report.to_records(), indent=2) + "\n")


def write_report(report: ExperimentReport, path: Union[str, Path]) -> List[Path]:
    """Write CSV or JSON by suffix; a path without suffix gets both."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".json":
        targets = [(path, write_json)]
    elif path.suffix:
        targets = [(path, write_csv)]
    else:
        targets = [(path.with_suffix(".csv"), write_csv), (path.with_suffix(".json"), write_json)]
    written = []
    for target, writer in targets:
        writer(report, target)
        logger.info("wrote %d rows to %s", len(report.rows), target)
        written.append(target)
    return written


def summarize(report: ExperimentReport, metric: str) -> str:
    """One-line summary used by the command line."""
    values: Sequence[float] = [v for v in report.column(metric) if isinstance(v, (int, float))]
    if not values:
        return f"{report.name}: {len(report.rows)} rows"
    return (
        f"{report.name}: {len(report.rows)} rows, {metric} in "
        f"[{format_number(min(values))}, {format_number(max(values))}]"
    )
