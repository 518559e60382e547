from .errors import (
    BracketError,
    ConfigError,
    DegenerateDecompositionError,
    DomainError,
    FitError,
    InvalidParametersError,
    LShapeError,
    QuadratureError,
    SolverError,
)
from .models import BaseConfig, LShapeParams, PathPoint, Prevertices

__all__ = [
    "LShapeError",
    "InvalidParametersError",
    "DegenerateDecompositionError",
    "DomainError",
    "QuadratureError",
    "SolverError",
    "BracketError",
    "FitError",
    "ConfigError",
    "BaseConfig",
    "LShapeParams",
    "PathPoint",
    "Prevertices",
]
