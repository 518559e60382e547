"""
Adaptive quadrature for products of algebraic endpoint factors.

Integrands have the form  prod_j |x - p_j|^{e_j}  with exponents +-1/2. Every
interval is split at its midpoint and each half is mapped to the chart
x = endpoint +- s^2, which turns the inverse-square-root endpoint behavior into an
analytic integrand; QUADPACK (scipy.integrate.quad) then integrates the chart.
Infinite tails use x = +-1/s^2.
"""

import logging
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from core.errors import QuadratureError
from core.models import QuadratureConfig

logger = logging.getLogger(__name__)

Anchor = Union[int, float]  # index into the singular points, or a plain abscissa

# QUADPACK never reports an error estimate below 50 eps times the integral
QUADPACK_FLOOR = 50 * np.finfo(float).eps


@lru_cache(maxsize=None)
def gauss_table(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1] (computed once per order)"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def adaptive_quad(
    func: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    cfg: QuadratureConfig,
) -> float:
    """Integrate a vectorized smooth function over [lo, hi] with scipy's QUADPACK"""
    if hi == lo:
        return 0.0

    def scalar(s: float) -> float:
        return float(func(np.array([s]))[0])

    result = integrate.quad(
        scalar, lo, hi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=cfg.limit, full_output=1
    )
    value, error = float(result[0]), float(result[1])
    if len(result) > 3:
        budget = max(cfg.abs_tol, cfg.rel_tol * abs(value))
        if not np.isfinite(value) or error > budget:
            logger.debug(f"QUADPACK on [{lo}, {hi}]: {result[3]}")
            raise QuadratureError(
                f"no convergence on [{lo!r}, {hi!r}] within {cfg.limit} subintervals "
                f"(error estimate {error:.3e}, requested {budget:.3e})"
            )
    return value


class SingularProduct:
    """The weight prod_j |x - p_j|^{e_j} with precise pairwise offsets"""

    def __init__(
        self,
        points: Sequence[float],
        exponents: Sequence[float],
        offsets: Optional[np.ndarray] = None,
    ):
        self.points = np.asarray(points, dtype=float)
        self.exponents = np.asarray(exponents, dtype=float)
        if offsets is None:
            offsets = self.points[None, :] - self.points[:, None]
        # offsets[k, j] = p_j - p_k
        self.offsets = np.asarray(offsets, dtype=float)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        dist = np.abs(x[..., None] - self.points)
        return np.prod(dist ** self.exponents, axis=-1)

    def _anchor(self, anchor: Anchor) -> Tuple[float, np.ndarray, Optional[float]]:
        if isinstance(anchor, (int, np.integer)):
            k = int(anchor)
            offsets = self.offsets[k].copy()
            offsets[k] = np.nan
            return float(self.points[k]), offsets, float(self.exponents[k])
        return float(anchor), self.points - float(anchor), None

    def length(self, lo: Anchor, hi: Anchor) -> float:
        if isinstance(lo, (int, np.integer)) and isinstance(hi, (int, np.integer)):
            return float(self.offsets[int(lo), int(hi)])
        return self._anchor(hi)[0] - self._anchor(lo)[0]

    def chart(self, anchor: Anchor, sign: float) -> Callable[[np.ndarray], np.ndarray]:
        """Integrand of the s-chart x = anchor + sign * s^2, including dx = 2s ds"""
        _, offsets, own = self._anchor(anchor)
        mask = ~np.isnan(offsets)
        others = offsets[mask]
        exps = self.exponents[mask]

        def func(s: np.ndarray) -> np.ndarray:
            s2 = s * s
            head = 2.0 * s if own is None else 2.0 * s ** (1.0 + 2.0 * own)
            dist = np.abs(sign * s2[:, None] - others)
            return head * np.prod(dist ** exps, axis=-1)

        return func

    def tail_chart(self, sign: float) -> Callable[[np.ndarray], np.ndarray]:
        """Integrand of x = sign / s^2 (a neighbourhood of infinity), including |dx|"""
        if not np.isclose(self.exponents.sum(), -1.5):
            raise QuadratureError("tail chart needs total exponent -3/2")
        points = self.points
        exps = self.exponents

        def func(s: np.ndarray) -> np.ndarray:
            s2 = s * s
            dist = np.abs(1.0 - sign * points * s2[:, None])
            return 2.0 * np.prod(dist ** exps, axis=-1)

        return func

    def integrate(self, lo: Anchor, hi: Anchor, cfg: QuadratureConfig) -> float:
        """Integral over [lo, hi]; both ends may be singular"""
        length = self.length(lo, hi)
        if length < 0:
            raise QuadratureError(f"reversed interval ({lo}, {hi})")
        if length == 0:
            return 0.0
        smax = np.sqrt(0.5 * length)
        left = adaptive_quad(self.chart(lo, 1.0), 0.0, smax, cfg)
        right = adaptive_quad(self.chart(hi, -1.0), 0.0, smax, cfg)
        return left + right

    def integrate_from(self, anchor: Anchor, length: float, cfg: QuadratureConfig) -> float:
        """Integral over [anchor, anchor + length] with only the anchor singular"""
        if length <= 0:
            return 0.0
        return adaptive_quad(self.chart(anchor, 1.0), 0.0, np.sqrt(length), cfg)

    def tail(self, start: float, sign: float, cfg: QuadratureConfig) -> float:
        """Integral over [start, inf) for sign=+1 or (-inf, -start] for sign=-1"""
        if start <= 0:
            raise QuadratureError("tail must start away from the origin")
        return adaptive_quad(self.tail_chart(sign), 0.0, 1.0 / np.sqrt(start), cfg)
