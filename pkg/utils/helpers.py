import hashlib
import json
import math
from fractions import Fraction
from typing import Any, Mapping

from core.errors import ConfigError

TRUE_STRINGS = ("true", "1", "yes", "on")
FALSE_STRINGS = ("false", "0", "no", "off")


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any binary64 value"""
    if value is None:
        return "nan"
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".17g")


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer or a terminating decimal without going through float"""
    if isinstance(text, Fraction):
        return text
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a rational number: {text!r}") from e


def parse_float(text: str, name: str) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be a number, got {text!r}") from e
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {text!r}")
    return value


def parse_int(text: str, name: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {text!r}") from e


def parse_bool(text: str, name: str) -> bool:
    value = str(text).strip().lower()
    if value in TRUE_STRINGS:
        return True
    if value in FALSE_STRINGS:
        return False
    raise ConfigError(f"{name} must be true or false, got {text!r}")


def parse_triple(text: str, name: str):
    parts = [p for p in str(text).replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ConfigError(f"{name} needs three comma-separated values, got {text!r}")
    return parts


def config_hash(payload: Mapping[str, Any]) -> str:
    """sha256 of the canonical JSON form"""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
