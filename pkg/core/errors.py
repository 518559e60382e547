class LShapeError(Exception):
    """Base class for every error raised by the toolkit"""


class InvalidParametersError(LShapeError, ValueError):
    """Input violates a domain-type invariant"""


class DegenerateDecompositionError(LShapeError):
    """b = 0: the upper annulus has zero height"""


class DomainError(LShapeError, ValueError):
    """Point or argument outside the domain of an operation"""


class QuadratureError(LShapeError):
    """Adaptive quadrature hit its subdivision limit"""


class SolverError(LShapeError):
    """Parameter or root solve did not reach its tolerance"""


class BracketError(SolverError):
    """No sign change found for a bracketed root solve"""


class FitError(LShapeError):
    """Not enough (or invalid) samples for an asymptotic fit"""


class ConfigError(LShapeError, ValueError):
    """Run configuration could not be parsed or validated"""
