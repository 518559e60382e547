"""
Schwarz-Christoffel maps onto the L-shaped polygons.

F(z) = J^{-1} int_1^z sqrt(w - zeta + r) / (sqrt(w + 1) sqrt(w - zeta) sqrt(w - lambda) sqrt(w - 1)) dw

sends 1, inf, -1, zeta - r, zeta, lambda to P5, P1, P2, Q, P3, P4. The side
lengths are a = A/J, b = B/J, q = Q/J.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from core.errors import BracketError, DomainError, InvalidParametersError, QuadratureError, SolverError
from core.models import (
    LShapeParams,
    Prevertices,
    QuadratureConfig,
    SideFunctionals,
    SolverConfig,
)
from core.quadrature import SingularProduct

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE = QuadratureConfig()
DEFAULT_SOLVER = SolverConfig()

# prevertices closer than this are treated as a collision
COLLISION_TOL = 4 * np.finfo(float).eps


class ScIntegrand:
    """The SC integrand magnitude for fixed prevertices, with named anchors"""

    def __init__(self, p: Prevertices):
        self.p = p
        if p.r > 0:
            gaps = (p.zeta - p.r + 1.0, p.r, p.lam - p.zeta, 1.0 - p.lam)
            if min(gaps) <= COLLISION_TOL:
                raise QuadratureError(f"prevertex collision at {p}")
            points = [-1.0, p.zeta - p.r, p.zeta, p.lam, 1.0]
            exponents = [-0.5, 0.5, -0.5, -0.5, -0.5]
            offsets = np.subtract.outer(points, points).T
            # the pair (zeta - r, zeta) is separated by exactly r
            offsets[1, 2], offsets[2, 1] = p.r, -p.r
            self.weight = SingularProduct(points, exponents, offsets)
            self.minus_one, self.reflex, self.zeta, self.lam, self.one = 0, 1, 2, 3, 4
        else:
            if min(p.zeta + 1.0, p.lam - p.zeta, 1.0 - p.lam) <= COLLISION_TOL:
                raise QuadratureError(f"prevertex collision at {p}")
            # sqrt(w - zeta) cancels: four-prevertex (rectangle) integrand
            self.weight = SingularProduct([-1.0, p.lam, 1.0], [-0.5, -0.5, -0.5])
            self.minus_one, self.lam, self.one = 0, 1, 2
            self.reflex = self.zeta = float(p.zeta)

    def __call__(self, x):
        return self.weight(x)

    def side_A(self, cfg: QuadratureConfig) -> float:
        c = cfg.tail_cutoff
        return self.weight.tail(c, -1.0, cfg) + self._finite(-c, self.minus_one, cfg)

    def side_B(self, cfg: QuadratureConfig) -> float:
        if self.p.r == 0:
            return 0.0
        return self.weight.integrate(self.reflex, self.zeta, cfg)

    def side_J(self, cfg: QuadratureConfig) -> float:
        c = cfg.tail_cutoff
        return self._finite(self.one, c, cfg) + self.weight.tail(c, 1.0, cfg)

    def side_Q(self, cfg: QuadratureConfig) -> float:
        return self.weight.integrate(self.zeta, self.lam, cfg)

    def side_top(self, cfg: QuadratureConfig) -> float:
        return self.weight.integrate(self.minus_one, self.reflex, cfg)

    def side_right(self, cfg: QuadratureConfig) -> float:
        return self.weight.integrate(self.lam, self.one, cfg)

    def _finite(self, lo, hi, cfg: QuadratureConfig) -> float:
        return self.weight.integrate(lo, hi, cfg)


@lru_cache(maxsize=8192)
def side_functionals(p: Prevertices, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> SideFunctionals:
    """Evaluate A, B, J, Q as positive magnitudes"""
    integrand = ScIntegrand(p)
    return SideFunctionals(
        A=integrand.side_A(cfg),
        B=integrand.side_B(cfg),
        J=integrand.side_J(cfg),
        Q=integrand.side_Q(cfg),
    )


def closure_sides(p: Prevertices, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> Tuple[float, float]:
    """Normalized lengths of P2Q and P4P5; they equal 1 - q and a + b"""
    integrand = ScIntegrand(p)
    J = side_functionals(p, cfg).J
    return integrand.side_top(cfg) / J, integrand.side_right(cfg) / J


def integrand_value(p: Prevertices, x) -> np.ndarray:
    """Magnitude of the SC integrand at real points x"""
    return ScIntegrand(p)(np.atleast_1d(np.asarray(x, dtype=float)))


# --- parameter problem ------------------------------------------------------


def _gaps_to_prevertices(gaps: Sequence[float]) -> Prevertices:
    g0, g1, g2, _ = gaps
    reflex = -1.0 + g0
    zeta = reflex + g1
    return Prevertices(lam=zeta + g2, zeta=zeta, r=g1)


def _unpack(u: np.ndarray) -> Prevertices:
    logits = np.concatenate(([0.0], u))
    logits -= logits.max()
    weights = np.exp(logits)
    return _gaps_to_prevertices(2.0 * weights / weights.sum())


def _pack(p: Prevertices) -> np.ndarray:
    gaps = np.array([p.zeta - p.r + 1.0, p.r, p.lam - p.zeta, 1.0 - p.lam])
    logs = np.log(gaps)
    return logs[1:] - logs[0]


def _log_residual(u: np.ndarray, target: np.ndarray, cfg: QuadratureConfig) -> np.ndarray:
    sides = np.array(side_functionals(_unpack(u), cfg).sides())
    return np.log(sides) - np.log(target)


def side_errors(sides: Sequence[float], target: Sequence[float]) -> List[float]:
    """Relative error of each side; absolute where the target side is 0"""
    return [abs(s - t) / t if t > 0 else abs(s - t) for s, t in zip(sides, target)]


def side_residual(p: Prevertices, target: Sequence[float], cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Largest relative side error of p against the target (a, b, q)"""
    return max(side_errors(side_functionals(p, cfg).sides(), target))


def _newton(u0: np.ndarray, target: np.ndarray, solver: SolverConfig) -> np.ndarray:
    """Damped Newton with backtracking on the log-residual"""
    cfg = solver.quadrature
    u = np.array(u0, dtype=float)
    res = _log_residual(u, target, cfg)
    for iteration in range(solver.max_iter):
        p = _unpack(u)
        residual = side_residual(p, target, cfg)
        if residual <= solver.tol:
            logger.debug(f"Newton converged in {iteration} iterations at {p}")
            return u
        h = solver.fd_step
        jac = np.empty((3, 3))
        for j in range(3):
            step = np.zeros(3)
            step[j] = h
            jac[:, j] = (_log_residual(u + step, target, cfg) - _log_residual(u - step, target, cfg)) / (2 * h)
        try:
            delta = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as e:
            raise SolverError(f"singular Jacobian at {p}") from e
        norm = np.linalg.norm(res)
        alpha = 1.0
        for _ in range(solver.max_halvings):
            trial = u + alpha * delta
            try:
                trial_res = _log_residual(trial, target, cfg)
            except (QuadratureError, InvalidParametersError):
                trial_res = None
            if trial_res is not None and np.linalg.norm(trial_res) <= (1.0 - 1e-4 * alpha) * norm:
                break
            alpha *= 0.5
        else:
            # crowded prevertices put the rounding floor of the sides above tol
            if residual <= solver.stall_tol:
                logger.debug(f"Line search stalled at the rounding floor: {p} (residual {residual:.3e})")
                return u
            raise SolverError(f"line search stalled at {p} (residual {residual:.3e})")
        logger.debug(f"Newton step {iteration}: |res|={norm:.3e}, alpha={alpha}")
        u, res = trial, trial_res
    residual = side_residual(_unpack(u), target, cfg)
    if residual > solver.accept_tol:
        raise SolverError(f"residual {residual:.3e} above tolerance after {solver.max_iter} iterations")
    return u


def _continuation(u_start: np.ndarray, target: np.ndarray, solver: SolverConfig) -> np.ndarray:
    """Track the solution from the sides of u_start to the target, halving steps on failure"""
    cfg = solver.quadrature
    start = np.log(side_functionals(_unpack(u_start), cfg).sides())
    goal = np.log(target)
    u = u_start
    s, step = 0.0, 1.0 / solver.continuation_steps
    while s < 1.0:
        s_next = min(1.0, s + step)
        waypoint = np.exp((1.0 - s_next) * start + s_next * goal)
        try:
            u = _newton(u, waypoint, solver)
            s = s_next
            step *= 2.0
        except SolverError:
            step *= 0.5
            if step < 1e-6:
                raise SolverError(f"continuation stalled at s={s:.6f}")
            logger.debug(f"Continuation step halved to {step:.3e} at s={s:.6f}")
    return u


def _solve_rectangle_lambda(a: float, cfg: QuadratureConfig) -> float:
    """r = 0: a = A/J depends on lambda alone and decreases in it"""

    def excess(lam: float) -> float:
        return side_functionals(Prevertices(lam, -1.0 + 0.5 * (lam + 1.0)), cfg).a - a

    for gap in (1e-3, 1e-6, 1e-9, 1e-12):
        lo, hi = -1.0 + gap, 1.0 - gap
        f_lo, f_hi = excess(lo), excess(hi)
        if f_lo > 0 > f_hi:
            return brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    raise BracketError(f"no bracket for lambda with a={a}")


def _solve_rectangle_zeta(lam: float, q: float, cfg: QuadratureConfig) -> float:
    """r = 0: q = Q/J decreases from 1 to 0 as zeta runs over (-1, lambda)"""

    def excess(zeta: float) -> float:
        return side_functionals(Prevertices(lam, zeta), cfg).q - q

    span = lam + 1.0
    for gap in (1e-3, 1e-6, 1e-9, 1e-12):
        lo, hi = -1.0 + gap * span, lam - gap * span
        if excess(lo) > 0 > excess(hi):
            return brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    raise BracketError(f"no bracket for zeta with q={q}")


def solve_parameters(
    target: LShapeParams,
    solver: SolverConfig = DEFAULT_SOLVER,
    initial: Optional[Prevertices] = None,
) -> Prevertices:
    """Find prevertices whose SC map has image L(a, b, q)"""
    a, b, q = target.as_float()
    cfg = solver.quadrature
    if b == 0:
        lam = _solve_rectangle_lambda(a, cfg)
        zeta = _solve_rectangle_zeta(lam, q, cfg)
        p = Prevertices(lam, zeta)
    else:
        goal = np.array([a, b, q])
        if initial is not None and initial.r == 0:
            raise SolverError("initial guess for b > 0 needs r > 0")
        u0 = _pack(initial) if initial is not None else np.zeros(3)
        try:
            u = _newton(u0, goal, solver)
        except SolverError as e:
            logger.warning(f"Direct Newton failed for {target} ({e}); falling back to continuation")
            u = _continuation(u0, goal, solver)
        p = _unpack(u)
    residual = side_residual(p, (a, b, q), cfg)
    if residual > solver.accept_tol:
        raise SolverError(f"residual {residual:.3e} above tolerance {solver.accept_tol:.1e} for {target}")
    logger.debug(f"Solved {target}: {p} (residual {residual:.2e})")
    return p


# --- boundary maps ----------------------------------------------------------


def forward_offset(p: Prevertices, dx: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """F at x = 1 + dx, normalized to [0, 1); dx is taken exactly, not rebuilt from x"""
    if not dx >= 0:
        raise DomainError(f"forward_offset needs dx >= 0, got {dx}")
    if dx == 0:
        return 0.0
    if math.isinf(dx):
        return 1.0
    integrand = ScIntegrand(p)
    J = side_functionals(p, cfg).J
    if 1.0 + dx <= cfg.tail_cutoff:
        return integrand.weight.integrate_from(integrand.one, dx, cfg) / J
    return 1.0 - integrand.weight.tail(1.0 + dx, 1.0, cfg) / J


def forward_boundary(p: Prevertices, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """F restricted to [1, inf), normalized so that it runs over [0, 1)"""
    if not x >= 1:
        raise DomainError(f"forward_boundary needs x >= 1, got {x}")
    return forward_offset(p, x - 1.0, cfg)


def _safeguarded_newton(
    func: Callable[[float], Tuple[float, float]],
    lo: float,
    hi: float,
    start: float,
    tol: float,
    max_iter: int,
) -> float:
    """Root of an increasing func bracketed by f(lo) < 0 < f(hi)

    A bisection step replaces any Newton step that leaves the bracket or does
    not shrink the residual fast enough.
    """
    x = start if lo < start < hi else 0.5 * (lo + hi)
    f, df = func(x)
    dx_old = hi - lo
    for _ in range(max_iter):
        if f == 0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        if df > 0 and np.isfinite(df) and lo < x - f / df < hi and abs(2.0 * f) < abs(dx_old * df):
            x_new = x - f / df
        else:
            x_new = 0.5 * (lo + hi)
        step = abs(x_new - x)
        dx_old = step
        x = x_new
        if step <= tol * max(abs(x), 1e-300) or hi - lo <= tol * max(abs(x), 1e-300):
            return x
        f, df = func(x)
    raise SolverError(f"safeguarded Newton did not converge in [{lo}, {hi}]")


def inverse_offset(
    p: Prevertices,
    s: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    guess: Optional[float] = None,
    tol: float = 1e-15,
    max_iter: int = 200,
) -> float:
    """Solve forward_offset(p, dx) = s for dx = x - 1 >= 0

    For s <= 1/2 the unknown is v = sqrt(dx), which removes the square-root
    behavior at x = 1 and keeps every digit of dx. For s > 1/2 it is
    w = x^{-1/2} in (0, 1], which keeps s -> 1 (x -> inf) bounded.
    """
    if not 0 <= s < 1:
        raise DomainError(f"inverse_boundary needs 0 <= s < 1, got {s}")
    if s == 0:
        return 0.0
    integrand = ScIntegrand(p)
    J = side_functionals(p, cfg).J

    if s <= 0.5:
        # d/dv of int_1^{1+v^2} is the s-chart integrand anchored at 1
        chart = integrand.weight.chart(integrand.one, 1.0)

        def near_chart(v: float) -> Tuple[float, float]:
            return forward_offset(p, v * v, cfg) - s, float(chart(np.array([v]))[0]) / J

        hi = 1.0
        while near_chart(hi)[0] <= 0:
            hi *= 2.0
            if hi > 1e150:
                raise BracketError(f"no upper bracket for s={s}")
        start = math.sqrt(guess) if guess is not None and guess > 0 else 0.5 * hi
        v = _safeguarded_newton(near_chart, 0.0, hi, start, tol, max_iter)
        return v * v

    def far_chart(w: float) -> Tuple[float, float]:
        # increasing in -w, so negate to keep the increasing convention
        x = 1.0 / (w * w)
        slope = float(integrand(np.array([x]))[0]) / J
        return s - forward_boundary(p, x, cfg), slope * 2.0 / w ** 3

    # 1 - f(x) ~ 2 w / J for small w
    w_lo = min(0.5, 0.25 * (1.0 - s) * J)
    while far_chart(w_lo)[0] >= 0:
        w_lo *= 0.5
        if w_lo < 1e-300:
            raise BracketError(f"no lower bracket for s={s}")
    start = (1.0 + guess) ** -0.5 if guess is not None and guess > 0 else 0.5 * (w_lo + 1.0)
    w = _safeguarded_newton(far_chart, w_lo, 1.0, start, tol, max_iter)
    return 1.0 / (w * w) - 1.0


def inverse_boundary(
    p: Prevertices,
    s: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    guess: Optional[float] = None,
    tol: float = 1e-15,
    max_iter: int = 200,
) -> float:
    """Solve forward_boundary(p, x) = s for x in [1, inf)"""
    offset_guess = guess - 1.0 if guess is not None else None
    return 1.0 + inverse_offset(p, s, cfg, offset_guess, tol, max_iter)


def _check_pair(p0: Prevertices, p1: Prevertices):
    if p0.r != 0:
        raise DomainError("reference prevertices must have r = 0")
    if (p0.lam, p0.zeta) != (p1.lam, p1.zeta):
        raise DomainError(f"prevertices {p0} and {p1} do not share (lambda, zeta)")


def boundary_map_g(
    p0: Prevertices, p1: Prevertices, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """g = f2 o f1^{-1} on [0, 1]"""
    _check_pair(p0, p1)
    if not 0 <= x <= 1:
        raise DomainError(f"boundary map is defined on [0, 1], got {x}")
    if x == 0 or x == 1:
        return float(x)
    if p1 == p0:
        return float(x)
    return forward_offset(p1, inverse_offset(p0, x, cfg), cfg)


def _integrand_ratio(p0: Prevertices, p1: Prevertices, dy: float) -> float:
    # f2'/f1' up to the J normalizations at y = 1 + dy: the two integrands differ
    # only by the factor sqrt(y - zeta + r) / sqrt(y - zeta)
    if math.isinf(dy):
        return 1.0
    gap = dy + (1.0 - p1.zeta)
    return math.sqrt((gap + p1.r) / gap)


def boundary_derivative(
    p0: Prevertices, p1: Prevertices, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """dg/dx = f2'(y) / f1'(y) at y = f1^{-1}(x)"""
    _check_pair(p0, p1)
    if not 0 <= x <= 1:
        raise DomainError(f"boundary map is defined on [0, 1], got {x}")
    if p1 == p0:
        return 1.0
    J0 = side_functionals(p0, cfg).J
    J1 = side_functionals(p1, cfg).J
    dy = math.inf if x == 1 else inverse_offset(p0, x, cfg)
    return J0 / J1 * _integrand_ratio(p0, p1, dy)


class BoundaryMap:
    """Handle for g_t = f2 o f1^{-1} and its derivative"""

    def __init__(self, p0: Prevertices, p1: Prevertices, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
        _check_pair(p0, p1)
        self.p0 = p0
        self.p1 = p1
        self.cfg = cfg
        self._j_ratio = side_functionals(p0, cfg).J / side_functionals(p1, cfg).J

    @property
    def is_identity(self) -> bool:
        return self.p0 == self.p1

    def __call__(self, x: float) -> float:
        return boundary_map_g(self.p0, self.p1, x, self.cfg)

    def derivative(self, x: float) -> float:
        return boundary_derivative(self.p0, self.p1, x, self.cfg)

    def evaluate(self, xs: Iterable[float]) -> Tuple[np.ndarray, np.ndarray]:
        """(g, g') on a grid, reusing each preimage as the next Newton guess"""
        xs = np.asarray(list(xs), dtype=float)
        g = np.empty_like(xs)
        dg = np.empty_like(xs)
        if self.is_identity:
            return xs.copy(), np.ones_like(xs)
        guess: Optional[float] = None
        for i in np.argsort(xs):
            x = float(xs[i])
            if x == 0:
                dy = 0.0
                g[i] = 0.0
            elif x == 1:
                dy = math.inf
                g[i] = 1.0
            else:
                dy = inverse_offset(self.p0, x, self.cfg, guess=guess)
                g[i] = forward_offset(self.p1, dy, self.cfg)
                guess = dy
            dg[i] = self._j_ratio * _integrand_ratio(self.p0, self.p1, dy)
        return g, dg


def sup_deviation(bmap: BoundaryMap, xs: Sequence[float]) -> Tuple[float, float]:
    """(sup |g(x) - x|, sup |g'(x) - 1|) over the grid"""
    g, dg = bmap.evaluate(xs)
    xs = np.asarray(xs, dtype=float)
    return float(np.max(np.abs(g - xs))), float(np.max(np.abs(dg - 1.0)))


def sweep_r(p: Prevertices, rs: Sequence[float], cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> List[SideFunctionals]:
    """Side functionals along r with (lambda, zeta) held fixed"""
    return [side_functionals(p.with_r(float(r)), cfg) for r in rs]
