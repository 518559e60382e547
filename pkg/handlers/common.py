import json
import logging
from pathlib import Path
from typing import Any, Mapping

from config.settings import RunConfig
from utils.helpers import format_float, format_rational
from utils.tables import TOOL_VERSION, csv_line

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_SOLVER = 4
EXIT_SWEEP = 5

# more failed rows than this share makes a sweep fail
SWEEP_FAILURE_SHARE = 0.10


def run_metadata(config: RunConfig) -> dict:
    """Header fields shared by every emitted table"""
    return {
        "config_hash": config.config_hash,
        "a0": format_rational(config.base.a0),
        "b0": format_rational(config.base.b0),
        "q0": format_rational(config.base.q0),
        "quad_abs_tol": format_float(config.quadrature.abs_tol),
        "quad_rel_tol": format_float(config.quadrature.rel_tol),
        "solver_tol": format_float(config.solver.tol),
    }


def _plain(value: Any):
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (str, bool, int)) or value is None:
        return value
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return format_rational(value)
    if isinstance(value, complex):
        return [format_float(value.real), format_float(value.imag)]
    return format_float(value)


def write_report(report: Mapping[str, Any], directory, name: str, fmt: str) -> Path:
    """Key/value report: JSON object, or two-column CSV with flattened keys"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = _plain({"tool_version": TOOL_VERSION, **report})
    path = directory / f"{name}.{fmt}"
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        lines = ["key,value"]
        for key, value in _flatten(payload):
            lines.append(csv_line([key, value]))
        text = "\n".join(lines) + "\n"
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote report to {path}")
    return path


def _flatten(payload, prefix: str = ""):
    if isinstance(payload, dict):
        for key in sorted(payload):
            yield from _flatten(payload[key], f"{prefix}.{key}" if prefix else key)
    elif isinstance(payload, list):
        for i, value in enumerate(payload):
            yield from _flatten(value, f"{prefix}.{i}")
    else:
        yield prefix, payload
