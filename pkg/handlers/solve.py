import logging
from typing import Optional, Sequence

from config.settings import RunConfig
from core.errors import ConfigError, InvalidParametersError, LShapeError
from core.models import LShapeParams, Prevertices
from core.sc_solver import closure_sides, side_errors, side_functionals, solve_parameters
from handlers.common import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, run_metadata, write_report
from utils.helpers import parse_float, parse_rational

logger = logging.getLogger(__name__)


def solve_report(params: LShapeParams, p: Prevertices, config: RunConfig) -> dict:
    sides = side_functionals(p, config.quadrature)
    a, b, q = params.as_float()
    top, right = closure_sides(p, config.quadrature)
    # relative errors, the measure the solver converges on
    err_a, err_b, err_q, err_top, err_right = side_errors(
        (sides.a, sides.b, sides.q, top, right), (a, b, q, 1 - q, a + b)
    )
    residuals = {"a": err_a, "b": err_b, "q": err_q, "P2Q": err_top, "P4P5": err_right}
    return {
        "target": {"a": params.a, "b": params.b, "q": params.q},
        "prevertices": {"lambda": p.lam, "zeta": p.zeta, "r": p.r, "reflex": p.zeta - p.r},
        "functionals": {"A": sides.A, "B": sides.B, "J": sides.J, "Q": sides.Q},
        "residuals": residuals,
        "residual": max(err_a, err_b, err_q),
    }


def cmd_solve(config: RunConfig, target: Optional[Sequence[str]] = None, initial: Optional[Sequence[str]] = None) -> int:
    """Solve the parameter problem for the target (default: the base point)"""
    try:
        params = LShapeParams(*(parse_rational(v) for v in target)) if target else config.base.params
    except (ConfigError, InvalidParametersError) as e:
        logger.error(f"Invalid target: {e}")
        return EXIT_CONFIG

    try:
        values = [parse_float(v, "initial") for v in initial] if initial else None
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG

    try:
        guess = Prevertices(*values) if values else None
        p = solve_parameters(params, config.solver, initial=guess)
        report = solve_report(params, p, config)
    except (InvalidParametersError, LShapeError) as e:
        logger.error(f"Parameter problem failed for {params}: {e}")
        return EXIT_SOLVER

    report["metadata"] = run_metadata(config)
    write_report(report, config.output_dir, "solve", config.output_format)
    logger.info(
        f"Solved {params}: lambda={p.lam:.15g} zeta={p.zeta:.15g} r={p.r:.15g} "
        f"residual={report['residual']:.3e}"
    )
    if report["residual"] > config.solver.accept_tol:
        logger.error(f"Residual {report['residual']:.3e} above tolerance {config.solver.accept_tol:.1e}")
        return EXIT_SOLVER
    return EXIT_OK
