"""
The collar twist f_t between sigma_1(t) and sigma_2(t) and its Beltrami dilatation.

On the collar [0,1] x [0,a] of each sheet

    f(x + iy) = (y/a) x + (1 - y/a) g(x) + iy

which restricts to the boundary map g at y = 0 and to the identity at y = a.
Sheet 2 is read in the reflected chart w = x - iy, so its dilatation is the
complex conjugate of the sheet-1 value.
"""

import logging
import math
from typing import Iterable, Optional, Protocol, Sequence, Tuple

import numpy as np

from core.errors import DomainError
from core.models import BaseConfig, CollarSpec, PathPoint, SecondOrderReport, SecondOrderRow, SolverConfig
from core.paths import solve_path_point
from core.quadrature import gauss_table
from core.sc_solver import DEFAULT_SOLVER, BoundaryMap

logger = logging.getLogger(__name__)

# |f_z| below this means the map is not quasiconformal
DEGENERACY_TOL = 1e-8
PANEL_ORDER = 16
SHEETS = (1, 2)


class BoundaryCurve(Protocol):
    def __call__(self, x: float) -> float: ...

    def derivative(self, x: float) -> float: ...

    def evaluate(self, xs: Iterable[float]) -> Tuple[np.ndarray, np.ndarray]: ...


class PerturbedIdentity:
    """g(x) = x + eps sin(2 pi x) x (1 - x), monotone for small eps"""

    def __init__(self, eps: float):
        if abs(eps) >= 0.2:
            raise DomainError(f"eps={eps} does not give a homeomorphism of [0, 1]")
        self.eps = eps

    def __call__(self, x):
        return x + self.eps * np.sin(2 * np.pi * x) * x * (1 - x)

    def derivative(self, x):
        bump = 2 * np.pi * np.cos(2 * np.pi * x) * x * (1 - x) + np.sin(2 * np.pi * x) * (1 - 2 * x)
        return 1 + self.eps * bump

    def evaluate(self, xs):
        xs = np.asarray(list(xs), dtype=float)
        return self(xs), self.derivative(xs)


def _check_point(sheet: int, x: float, y: float):
    if sheet not in SHEETS:
        raise DomainError(f"sheet must be 1 or 2, got {sheet}")
    if not (0 <= x <= 1 and y >= 0):
        raise DomainError(f"point ({x}, {y}) is outside the strip [0,1] x [0, inf)")


def twist_map(g: BoundaryCurve, a_c: float, sheet: int, x: float, y: float) -> complex:
    """f(x + iy); the identity above the collar"""
    _check_point(sheet, x, y)
    if y >= a_c:
        return complex(x, y)
    s = y / a_c
    return complex(s * x + (1 - s) * float(g(x)), y)


def _derivatives(g_val, dg_val, x, y, a_c):
    """D and E of f_z = 1 + D + iE, f_zbar = D - iE on sheet 1"""
    blend = 1 - np.asarray(y) / a_c
    return 0.5 * blend * (dg_val - 1), (g_val - x) / (2 * a_c)


def _mu_from_parts(D, E, sheet: int):
    fz = 1 + D + 1j * E
    fzbar = D - 1j * E
    if np.any(np.abs(fz) < DEGENERACY_TOL):
        raise DomainError("f_z vanishes: the twist is not quasiconformal")
    mu = fzbar / fz
    return mu if sheet == 1 else np.conj(mu)


def beltrami(g: BoundaryCurve, a_c: float, sheet: int, x: float, y: float) -> complex:
    """mu = f_zbar / f_z from the closed forms; zero above the collar"""
    _check_point(sheet, x, y)
    if y >= a_c:
        return 0j
    D, E = _derivatives(float(g(x)), float(g.derivative(x)), x, y, a_c)
    return complex(_mu_from_parts(D, E, sheet))


def two_sheet_sum(D, E):
    """mu^1 + mu^2 split into its first-order part 2D and the remainder"""
    remainder = -2 * (1 + D) * (D * D + E * E) / ((1 + D) ** 2 + E * E)
    return 2 * D, remainder


def composite_nodes(lo: float, hi: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with PANEL_ORDER nodes per panel"""
    panels = max(1, math.ceil(count / PANEL_ORDER))
    nodes, weights = gauss_table(PANEL_ORDER)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    xs = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    ws = (half[:, None] * weights[None, :]).ravel()
    return xs, ws


class BeltramiField:
    """Dilatation of the collar twist sampled on a tensor Gauss grid of both sheets"""

    def __init__(self, g: BoundaryCurve, collar: CollarSpec):
        self.g = g
        self.collar = collar
        a_c = collar.height
        self.x, self.wx = composite_nodes(0.0, 1.0, collar.nx)
        self.y, self.wy = composite_nodes(0.0, a_c, collar.ny)
        g_val, dg_val = g.evaluate(self.x)
        self.g_values = np.asarray(g_val, dtype=float)
        self.dg_values = np.asarray(dg_val, dtype=float)
        D, E = _derivatives(self.g_values[:, None], self.dg_values[:, None], self.x[:, None], self.y[None, :], a_c)
        self.D, self.E = D, E
        self.samples = {sheet: _mu_from_parts(D, E, sheet) for sheet in SHEETS}
        # sup over the grid and the boundary row y = 0
        D0, E0 = _derivatives(self.g_values, self.dg_values, self.x, 0.0, a_c)
        edge = np.abs(_mu_from_parts(D0, E0, 1))
        self.sup_norm = float(max(np.max(np.abs(self.samples[1])), np.max(edge)))
        if self.sup_norm >= 1:
            raise DomainError(f"sup |mu| = {self.sup_norm} is not below 1")

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.wx, self.wy)

    def mu(self, sheet: int, x: float, y: float) -> complex:
        return beltrami(self.g, self.collar.height, sheet, x, y)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))


def sample_beltrami(g: BoundaryCurve, collar: CollarSpec) -> BeltramiField:
    return BeltramiField(g, collar)


def pair_twist_with_psi(field: BeltramiField) -> complex:
    """int mu psi = int over the collar of (mu^1 + mu^2) dx dy in the dz^2 chart"""
    return field.integrate(field.samples[1] + field.samples[2])


def pairing_parts(field: BeltramiField) -> Tuple[float, float]:
    """(int 2D, int remainder): the Fubini-zero first-order part and the rest"""
    leading, remainder = two_sheet_sum(field.D, field.E)
    return field.integrate(leading).real, field.integrate(remainder).real


def collar_height(cfg: BaseConfig, points: Sequence[PathPoint]) -> float:
    """Largest height below a0 and every a(t) of the sweep"""
    heights = [float(cfg.a0)] + [p.a for p in points]
    return min(heights)


def twist_for_point(point: PathPoint, solver: SolverConfig = DEFAULT_SOLVER) -> BoundaryMap:
    """Boundary map g_t = f_2 o f_1^{-1} from sigma_1(t) to sigma_2(t)"""
    return BoundaryMap(point.collapsed, point.prevertices, solver.quadrature)


def reference_bound(t: float) -> float:
    return t * t / math.log(1.0 / t) ** 2


def second_order_row(point: PathPoint, collar: CollarSpec, solver: SolverConfig = DEFAULT_SOLVER) -> SecondOrderRow:
    field = sample_beltrami(twist_for_point(point, solver), collar)
    abs_pair = abs(pair_twist_with_psi(field))
    return SecondOrderRow(
        t=point.t,
        r=point.r,
        sup_mu=field.sup_norm,
        abs_pair=abs_pair,
        proxy=field.sup_norm ** 2 + abs_pair,
        reference=reference_bound(point.t),
    )


def second_order_report(
    cfg: BaseConfig,
    ts: Sequence[float],
    solver: SolverConfig = DEFAULT_SOLVER,
    nx: int = 256,
    ny: int = 64,
    factor: float = 3.0,
    points: Optional[Sequence[PathPoint]] = None,
) -> SecondOrderReport:
    """Proxy bound sup|mu|^2 + |int mu psi| against t^2 / log^2(1/t)"""
    if points is None:
        points = [solve_path_point(cfg, t, solver) for t in ts]
    collar = CollarSpec(collar_height(cfg, points), nx, ny)
    rows = []
    for point in points:
        row = second_order_row(point, collar, solver)
        logger.info(f"t={row.t:.3e}: sup|mu|={row.sup_mu:.3e} |pair|={row.abs_pair:.3e} ratio={row.ratio:.4f}")
        rows.append(row)
    report = SecondOrderReport(rows=tuple(rows), collar_height=collar.height, factor=factor)
    if not report.bounded:
        logger.warning(f"Proxy/reference spread {report.spread:.3f} exceeds factor {factor}")
    return report
