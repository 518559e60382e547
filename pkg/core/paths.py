"""
The degenerating paths sigma_1(t) = S(a0, 0, q0 - t) and sigma_2(t) = S(a(t), b(t), q0).

Both share the prevertices (lambda(t), zeta(t)) of the rectangle L(a0, 0, q0 - t);
sigma_2 opens the reflex vertex by r(t) so that Q/J returns to q0.
"""

import logging
import math
from typing import List, Sequence

import numpy as np
from scipy.optimize import brentq

from core.errors import BracketError, DomainError, FitError, SolverError
from core.models import AsymptoticFit, BaseConfig, LShapeParams, PathPoint, Prevertices, SolverConfig
from core.sc_solver import DEFAULT_SOLVER, side_functionals, solve_parameters

logger = logging.getLogger(__name__)

# |Q/J - q0| accepted at a solved path point
PATH_RESIDUAL_TOL = 1e-9
MIN_FIT_POINTS = 6


def sigma1_params(cfg: BaseConfig, t) -> LShapeParams:
    """(a0, 0, q0 - t)"""
    if not 0 <= t < cfg.q0:
        raise DomainError(f"t must lie in [0, {cfg.q0}), got {t}")
    return LShapeParams(cfg.a0, 0, cfg.q0 - t)


def sigma2_params(cfg: BaseConfig, point: PathPoint) -> LShapeParams:
    return LShapeParams(point.a, point.b, cfg.q0)


def t_grid(t_min: float, t_max: float, count: int, log_spaced: bool = True) -> np.ndarray:
    """Sample grid strictly decreasing toward 0"""
    if count < 1:
        raise DomainError(f"grid needs at least one point, got {count}")
    if not 0 < t_min <= t_max:
        raise DomainError(f"invalid grid range [{t_min}, {t_max}]")
    if count == 1:
        return np.array([t_max], dtype=float)
    if log_spaced:
        grid = np.logspace(math.log10(t_max), math.log10(t_min), count)
    else:
        grid = np.linspace(t_max, t_min, count)
    return grid


def _opening_root(p0: Prevertices, q0: float, t: float, solver: SolverConfig) -> float:
    """Smallest r with Q/J(lambda, zeta, r) = q0, bracket grown geometrically"""
    cfg = solver.quadrature
    cap = (1.0 + p0.zeta) * (1.0 - 1e-12)

    def excess(r: float) -> float:
        return side_functionals(p0.with_r(r), cfg).q - q0

    lo, hi = 0.0, min(max(0.1 * t, 1e-14), 0.5 * cap)
    while excess(hi) <= 0:
        logger.debug(f"r bracket [{lo:.3e}, {hi:.3e}] does not contain the root; growing")
        if hi >= cap:
            raise BracketError(f"Q/J stays below {q0} for every admissible r at {p0}")
        lo, hi = hi, min(4.0 * hi, cap)
    return brentq(excess, lo, hi, xtol=max(1e-15 * hi, 1e-300), rtol=4 * np.finfo(float).eps, maxiter=200)


def solve_path_point(cfg: BaseConfig, t: float, solver: SolverConfig = DEFAULT_SOLVER) -> PathPoint:
    """Stage 1 solves the rectangle sigma_1(t); stage 2 opens it to sigma_2(t)"""
    t = float(t)
    q0 = float(cfg.q0)
    rectangle = sigma1_params(cfg, t)
    p0 = solve_parameters(rectangle, solver)
    if t == 0:
        return PathPoint(t=0.0, lam=p0.lam, zeta=p0.zeta, r=0.0, a=float(cfg.a0), b=0.0, fol_proxy=float(cfg.a0))
    r = _opening_root(p0, q0, t, solver)
    sides = side_functionals(p0.with_r(r), solver.quadrature)
    residual = abs(sides.q - q0)
    if residual > PATH_RESIDUAL_TOL:
        raise SolverError(f"opened map misses q0 by {residual:.3e} at t={t}")
    point = PathPoint(
        t=t,
        lam=p0.lam,
        zeta=p0.zeta,
        r=r,
        a=sides.a,
        b=sides.b,
        fol_proxy=sides.a + q0 * sides.b,
        residual=residual,
    )
    logger.debug(f"Path point t={t:.3e}: r={r:.6e} a={point.a:.12f} b={point.b:.6e}")
    return point


def fol_proxy(point: PathPoint, cfg: BaseConfig) -> float:
    """a(t) + q0 b(t)"""
    return point.a + float(cfg.q0) * point.b


def rho(point: PathPoint) -> float:
    """r(t) log(1/t) / t"""
    return point.r * math.log(1.0 / point.t) / point.t


def staged_agreement(cfg: BaseConfig, point: PathPoint, solver: SolverConfig = DEFAULT_SOLVER) -> float:
    """Max prevertex difference between the full solve of sigma_2(t) and the staged one"""
    full = solve_parameters(sigma2_params(cfg, point), solver, initial=point.prevertices)
    staged = point.prevertices
    return max(
        abs(full.lam - staged.lam),
        abs(full.zeta - staged.zeta),
        abs((full.zeta - full.r) - (staged.zeta - staged.r)),
    )


def _decades(t: np.ndarray) -> List[np.ndarray]:
    """Index sets of the samples in each full decade, finest last"""
    t_max = float(np.max(t))
    t_min = float(np.min(t))
    groups = []
    hi = t_max
    while hi / 10.0 >= t_min * (1.0 - 1e-12):
        lo = hi / 10.0
        idx = np.nonzero((t <= hi * (1 + 1e-12)) & (t >= lo * (1 - 1e-12)))[0]
        if idx.size >= 2:
            groups.append(idx)
        hi = lo
    return groups


def relative_variation(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    return float((values.max() - values.min()) / abs(values.mean()))


def fit_asymptotics(points: Sequence[PathPoint], a0: float) -> AsymptoticFit:
    """Fit r(t) ~ t / (C1 log(1/t)) and fol - a0 ~ beta1 t/log(1/t) + beta2 t^2/log(1/t)

    Both fits use relative (log-weighted) residuals so the large-t samples do not
    dominate the leading coefficients.
    """
    points = sorted(points, key=lambda p: -p.t)
    if len(points) < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} points, got {len(points)}")
    t = np.array([p.t for p in points], dtype=float)
    if np.any(t <= 0) or np.any(t >= 1):
        raise FitError("fit grid must lie in (0, 1)")
    if math.log10(t.max() / t.min()) < 2.0 - 1e-9:
        raise FitError(f"grid spans {math.log10(t.max() / t.min()):.2f} decades, need 2")
    log_inv = np.log(1.0 / t)
    ratios = np.array([p.r for p in points]) * log_inv / t
    if np.any(~(ratios > 0)):
        raise FitError("r(t) log(1/t) / t must be positive")

    # 1/rho = C1 + c / log(1/t): the intercept is the t -> 0 trend
    design = np.column_stack([np.ones_like(t), 1.0 / log_inv])
    (c1, _), *_ = np.linalg.lstsq(design, 1.0 / ratios, rcond=None)

    scale = t / log_inv
    excess = np.array([p.fol_proxy for p in points]) - a0
    design = np.column_stack([np.ones_like(t), t])
    coeffs, *_ = np.linalg.lstsq(design, excess / scale, rcond=None)
    beta1, beta2 = float(coeffs[0]), float(coeffs[1])
    residual = excess / scale - design @ coeffs
    residual_rms = float(np.sqrt(np.mean(residual ** 2)))

    # beta1 vanishes on the standard locus, so the t^2/log(1/t) term leads
    quadratic = excess / (t * scale)
    rho_variation = []
    beta1_by_decade = []
    beta2_by_decade = []
    for idx in _decades(t):
        lo, hi = float(t[idx].min()), float(t[idx].max())
        rho_variation.append((lo, hi, relative_variation(ratios[idx])))
        beta1_by_decade.append((lo, hi, float(np.mean(excess[idx] / scale[idx]))))
        beta2_by_decade.append((lo, hi, float(np.mean(quadratic[idx])), relative_variation(quadratic[idx])))
    if not rho_variation:
        raise FitError("no decade holds two samples")

    fit = AsymptoticFit(
        t=tuple(float(v) for v in t),
        rho=tuple(float(v) for v in ratios),
        c1=float(c1),
        beta1=beta1,
        beta2=beta2,
        residual_rms=residual_rms,
        rho_variation=tuple(rho_variation),
        beta1_by_decade=tuple(beta1_by_decade),
        beta2_by_decade=tuple(beta2_by_decade),
    )
    logger.info(f"Asymptotic fit: C1={fit.c1:.6g} beta1={fit.beta1:.6g} beta2={fit.beta2:.6g}")
    return fit
