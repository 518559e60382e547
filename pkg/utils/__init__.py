from .helpers import config_hash, format_float, format_rational, parse_rational
from .tables import SweepTable

__all__ = [
    "SweepTable",
    "config_hash",
    "format_float",
    "format_rational",
    "parse_rational",
]
