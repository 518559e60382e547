import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from utils.helpers import format_float

logger = logging.getLogger(__name__)

TOOL_VERSION = "1.0.0"


class SweepTable:
    """Ordered rows keyed by the first column, with a metadata header

    Numeric cells are written with 17 significant digits so identical runs give
    byte-identical files. Failed rows keep their place with nan cells and a
    message in the error column.
    """

    def __init__(self, name: str, columns: Sequence[str], metadata: Optional[Mapping[str, Any]] = None):
        if not columns:
            raise ValueError("a table needs at least one column")
        self.name = name
        self.columns = list(columns)
        self.metadata: Dict[str, Any] = {"tool_version": TOOL_VERSION}
        self.metadata.update(metadata or {})
        self.rows: List[Dict[str, Any]] = []
        self.has_error_column = "error" in self.columns

    @property
    def key(self) -> str:
        return self.columns[0]

    def add_row(self, values: Mapping[str, Any]):
        missing = [c for c in self.columns if c not in values and c != "error"]
        if missing:
            raise ValueError(f"row is missing cells {missing}")
        row = {c: values.get(c, "") for c in self.columns}
        if self.rows:
            previous = self.rows[-1][self.key]
            if not _strictly_monotone(previous, row[self.key], self._direction()):
                raise ValueError(f"{self.key} column must be strictly monotone, got {previous} then {row[self.key]}")
        self.rows.append(row)

    def add_failure(self, key_value: float, message: str):
        row = {c: math.nan for c in self.columns}
        row[self.key] = key_value
        if self.has_error_column:
            row["error"] = message
        self.add_row(row)

    def _direction(self) -> int:
        if len(self.rows) < 2:
            return 0
        return 1 if self.rows[1][self.key] > self.rows[0][self.key] else -1

    @property
    def failure_count(self) -> int:
        if not self.has_error_column:
            return 0
        return sum(1 for row in self.rows if row["error"])

    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]

    # --- serialization ---------------------------------------------------

    def _cell(self, value) -> str:
        if isinstance(value, str):
            return value
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, int):
            return str(value)
        return format_float(value)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        for key in sorted(self.metadata):
            buffer.write(f"# {key}: {self.metadata[key]}\n")
        writer = csv_writer(buffer)
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([self._cell(row[c]) for c in self.columns])
        return buffer.getvalue()

    def to_json(self) -> str:
        rows = [{c: self._json_cell(row[c]) for c in self.columns} for row in self.rows]
        payload = {"metadata": self.metadata, "columns": self.columns, "rows": rows}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def _json_cell(self, value):
        if isinstance(value, (str, bool, int)):
            return value
        # strings keep the 17-digit form and represent nan portably
        return format_float(value)

    def write(self, directory, fmt: str = "csv") -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.name}.{fmt}"
        text = self.to_csv() if fmt == "csv" else self.to_json()
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {len(self.rows)} rows to {path}")
        return path


def _strictly_monotone(previous, current, direction: int) -> bool:
    if isinstance(previous, float) and math.isnan(previous):
        return False
    if direction == 0:
        return current != previous
    return (current - previous) * direction > 0


def csv_writer(buffer):
    """csv writer with Unix line endings"""
    return csv.writer(buffer, lineterminator="\n")


def csv_line(cells: Sequence[Any]) -> str:
    buffer = io.StringIO()
    csv_writer(buffer).writerow(cells)
    return buffer.getvalue().rstrip("\n")
