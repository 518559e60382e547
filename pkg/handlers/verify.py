"""
Acceptance suite: every quantitative ingredient checked against an oracle.

Each criterion returns (passed, detail). Any exception inside a criterion is
reported as a failure with its message instead of aborting the run.
"""

import dataclasses
import logging
import math
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from config.settings import RunConfig
from core.models import LShapeParams, Prevertices
from core.quadrature import QUADPACK_FLOOR
from core.sc_solver import BoundaryMap, side_functionals, side_residual, solve_parameters
from core.surface_model import CLAIM_COVERS, cover_type, decompose_annuli, punctured_base_type, twist_data
from handlers.annulus import annulus_checks
from handlers.common import EXIT_FAILED, EXIT_OK
from handlers.sweep import SweepResult, run_sweep
from scripts.elliptic_oracle import rectangle_lambda

logger = logging.getLogger(__name__)

Outcome = Tuple[bool, str]

ROUND_TRIP_RTOL = 1e-8
SOLVE_SECONDS = 5.0
RECTANGLE_TOL = 1e-8
RHO_FINEST_VARIATION = 0.15
DEVIATION_FACTOR = 2.0
BELTRAMI_FACTOR = 3.0
FUBINI_TOL = 1e-10
PROXY_FACTOR = 3.0
SUP_MU_CEILING = 0.5
FOL_FINEST_VARIATION = 0.20
BETA2_STABILITY = 0.10
STENCIL_TOL = 1e-6
MAX_DENOMINATOR = 100

# punctured base Y minus Q for each reduction cover, in CLAIM_COVERS order
PUNCTURED_BASES = ((0, 3, 1), (0, 3, 1), (0, 3, 1), (0, 2, 2), (1, 0, 1))

# spread, crowded and rectangle configurations
CONVERGENCE_PREVERTICES = (
    Prevertices(0.3, -0.2, 0.05),
    Prevertices(0.3, -0.2, 1e-6),
    Prevertices(-0.9, -0.95, 0.04),
    Prevertices(0.0, -0.5),
)


class VerifyContext:
    """Shared state: the configuration, a seeded generator and one lazily run sweep"""

    def __init__(self, config: RunConfig, quick: bool = False):
        self.quick = quick
        if quick:
            config = dataclasses.replace(
                config,
                t_min=max(config.t_min, 1e-3),
                t_count=min(config.t_count, 13),
                grid_nx=min(config.grid_nx, 64),
                grid_ny=min(config.grid_ny, 32),
            )
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self._sweep: Optional[SweepResult] = None

    @property
    def samples(self) -> int:
        return 5 if self.quick else 20

    @property
    def sweep(self) -> SweepResult:
        if self._sweep is None:
            self._sweep = run_sweep(self.config)
        return self._sweep

    def rows(self) -> List[Tuple[object, Dict[str, float]]]:
        """(point, metrics) of every complete row, t decreasing"""
        result = self.sweep
        if result.table.failure_count:
            raise RuntimeError(f"{result.table.failure_count} sweep rows failed")
        return list(zip(result.points, result.metrics))


def _finest_decade(values: List[Tuple[float, float]]) -> List[float]:
    """Values whose t lies in the last decade of the grid"""
    t_min = min(t for t, _ in values)
    return [v for t, v in values if t <= 10 * t_min * (1 + 1e-12)]


# --- criteria -----------------------------------------------------------


def round_trip(ctx: VerifyContext) -> Outcome:
    worst, slowest = 0.0, 0.0
    for _ in range(ctx.samples):
        a, b, q = ctx.rng.uniform(0.5, 2.0), ctx.rng.uniform(0.0, 1.0), ctx.rng.uniform(0.2, 0.8)
        target = LShapeParams(a, b, q)
        start = time.perf_counter()
        p = solve_parameters(target, ctx.config.solver)
        slowest = max(slowest, time.perf_counter() - start)
        worst = max(worst, side_residual(p, (a, b, q), ctx.config.quadrature))
    return worst <= ROUND_TRIP_RTOL and slowest < SOLVE_SECONDS, f"max relative error={worst:.2e} slowest solve={slowest:.2f}s"


def rectangle_oracle(ctx: VerifyContext) -> Outcome:
    worst = 0.0
    for a in np.linspace(0.5, 2.0, 7):
        target = LShapeParams(float(a), 0, 0.5)
        p = solve_parameters(target, ctx.config.solver)
        worst = max(worst, abs(p.lam - rectangle_lambda(float(a))))
    return worst <= RECTANGLE_TOL, f"max |lambda - elliptic lambda|={worst:.2e}"


def claims_table(ctx: VerifyContext) -> Outcome:
    bad = []
    for (spec, expected), base in zip(CLAIM_COVERS, PUNCTURED_BASES):
        if cover_type(spec) != expected or punctured_base_type(spec).as_tuple() != base:
            bad.append(spec)
    return not bad, f"{len(CLAIM_COVERS) - len(bad)}/{len(CLAIM_COVERS)} covers reproduced"


def brute_force_twist(moduli, max_denominator: int = MAX_DENOMINATOR) -> Optional[Fraction]:
    """Smallest t with every m_j t integral among t with denominator <= max_denominator"""
    best = None
    for den in range(1, max_denominator + 1):
        # m_j * num / den is integral iff num is a multiple of the reduced denominator
        num = 1
        for m in moduli:
            num = math.lcm(num, (Fraction(m) / den).denominator)
        candidate = Fraction(num, den)
        if best is None or candidate < best:
            best = candidate
    return best


def twist_exactness(ctx: VerifyContext) -> Outcome:
    mismatches = 0
    for _ in range(10):
        a = Fraction(int(ctx.rng.integers(1, 13)), int(ctx.rng.integers(1, 7)))
        b = Fraction(int(ctx.rng.integers(1, 13)), int(ctx.rng.integers(1, 7)))
        den = int(ctx.rng.integers(2, 9))
        q = Fraction(int(ctx.rng.integers(1, den)), den)
        params = LShapeParams(a, b, q)
        data = twist_data(params)
        moduli = decompose_annuli(params).moduli
        integral = all((m * data.t).denominator == 1 for m in moduli)
        if not integral or brute_force_twist(moduli) != data.t:
            mismatches += 1
    return mismatches == 0, f"{10 - mismatches}/10 triples match the brute-force minimum"


def r_asymptotics(ctx: VerifyContext) -> Outcome:
    fit = ctx.sweep.fit
    if fit is None:
        return False, "fit unavailable"
    variations = [v for _, _, v in fit.rho_variation]
    decreasing = variations[-1] < variations[0]
    finest = variations[-1]
    positive = min(fit.rho) > 0
    return (
        positive and decreasing and finest < RHO_FINEST_VARIATION,
        f"decade variations={', '.join(f'{v:.3f}' for v in variations)} C1={fit.c1:.4g}",
    )


def boundary_map(ctx: VerifyContext) -> Outcome:
    rows = ctx.rows()
    g_ratio = [m["g_dev"] / p.r for p, m in rows]
    dg_ratio = [m["dg_dev"] / p.r for p, m in rows]
    g_spread = max(g_ratio) / min(g_ratio)
    dg_spread = max(dg_ratio) / min(dg_ratio)

    point = rows[len(rows) // 2][0]
    bmap = BoundaryMap(Prevertices(point.lam, point.zeta), point.prevertices, ctx.config.quadrature)
    h = 1e-5
    stencil = 0.0
    for x in (0.1, 0.3, 0.5, 0.7, 0.9):
        central = (bmap(x + h) - bmap(x - h)) / (2 * h)
        stencil = max(stencil, abs(central - bmap.derivative(x)))
    passed = g_spread < DEVIATION_FACTOR and dg_spread < DEVIATION_FACTOR and stencil <= STENCIL_TOL
    return passed, f"spread |g-x|/r={g_spread:.3f} |g'-1|/r={dg_spread:.3f} stencil error={stencil:.2e}"


def beltrami_bounds(ctx: VerifyContext) -> Outcome:
    rows = ctx.rows()
    sup_ratio = [m["sup_mu"] / p.r for p, m in rows]
    spread = max(sup_ratio) / min(sup_ratio)
    fubini = max(abs(m["leading"]) for _, m in rows)
    finest = _finest_decade([(p.t, m["abs_pair"] / p.r) for p, m in rows])
    monotone = all(later < earlier for earlier, later in zip(finest, finest[1:]))
    passed = spread < BELTRAMI_FACTOR and fubini < FUBINI_TOL and monotone
    return passed, f"sup|mu|/r spread={spread:.3f} max Fubini term={fubini:.2e} |pair|/r decreasing={monotone}"


def second_order_proxy(ctx: VerifyContext) -> Outcome:
    rows = ctx.rows()
    ratios = [m["proxy_bound"] / m["reference"] for _, m in rows]
    spread = max(ratios) / min(ratios)
    sup = max(m["sup_mu"] for _, m in rows)
    passed = spread < PROXY_FACTOR and sup < SUP_MU_CEILING
    return passed, f"proxy/reference in [{min(ratios):.4g}, {max(ratios):.4g}] spread={spread:.3f} max sup|mu|={sup:.3e}"


def annulus_identity(ctx: VerifyContext) -> Outcome:
    checks, _ = annulus_checks(2.0, ctx.rng, ctx.samples)
    failed = [name for name, passed, _ in checks if not passed]
    return not failed, "; ".join(detail for _, _, detail in checks)


def fol_expansion(ctx: VerifyContext) -> Outcome:
    # the t/log(1/t) coefficient vanishes, so the check runs on the t^2/log(1/t) one
    fit = ctx.sweep.fit
    if fit is None:
        return False, "fit unavailable"
    if len(fit.beta2_by_decade) < 2:
        return False, "fit spans fewer than two decades"
    betas = [beta for _, _, beta, _ in fit.beta2_by_decade]
    variation = fit.beta2_by_decade[-1][3]
    stability = abs(betas[-1] - betas[-2]) / abs(betas[-1]) if betas[-1] != 0 else math.inf
    nonzero = all(b > 0 for b in betas) or all(b < 0 for b in betas)
    linear = ", ".join(f"{beta:.3g}" for _, _, beta in fit.beta1_by_decade)
    passed = nonzero and variation < FOL_FINEST_VARIATION and stability < BETA2_STABILITY
    return passed, (
        f"finest-decade variation={variation:.3f} beta2 by decade={', '.join(f'{b:.4g}' for b in betas)} "
        f"stability={stability:.3f} beta1 by decade={linear}"
    )


def quadrature_convergence(ctx: VerifyContext) -> Outcome:
    """Halving the quadrature tolerance moves every functional by less than the tolerance it halves"""
    solver = ctx.config.solver
    quad = ctx.config.quadrature
    # functionals resolved at least as finely as the solver tolerance
    working = quad if quad.rel_tol <= solver.tol else quad.tightened(solver.tol / quad.rel_tol)
    halved = working.tightened()
    if halved.rel_tol < QUADPACK_FLOOR:
        return False, (
            f"solver tolerance {solver.tol:.1e} needs quadrature tolerance {halved.rel_tol:.1e}, "
            f"below the binary64 floor {QUADPACK_FLOOR:.1e}"
        )
    worst = 0.0
    for p in CONVERGENCE_PREVERTICES:
        coarse = side_functionals(p, working)
        fine = side_functionals(p, halved)
        for name in ("A", "B", "J", "Q"):
            before, after = getattr(coarse, name), getattr(fine, name)
            allowed = max(working.abs_tol, working.rel_tol * abs(after))
            worst = max(worst, abs(before - after) / allowed)
    return worst < 1.0, f"max change / tolerance={worst:.3f} at rel_tol={working.rel_tol:.1e}"


def determinism(ctx: VerifyContext) -> Outcome:
    small = dataclasses.replace(ctx.config, t_min=ctx.config.t_max / 10, t_count=3, grid_nx=32, grid_ny=16)
    first = run_sweep(small).table.to_csv()
    second = run_sweep(small).table.to_csv()
    return first == second, f"{len(first)} bytes, identical={first == second}"


CRITERIA: Tuple[Tuple[str, Callable[[VerifyContext], Outcome]], ...] = (
    ("SC round trip", round_trip),
    ("rectangle oracle", rectangle_oracle),
    ("claims table", claims_table),
    ("twist data", twist_exactness),
    ("r(t) asymptotics", r_asymptotics),
    ("boundary map", boundary_map),
    ("Beltrami bounds", beltrami_bounds),
    ("second-order proxy", second_order_proxy),
    ("annulus identity", annulus_identity),
    ("Fol proxy expansion", fol_expansion),
    ("determinism", determinism),
    ("quadrature convergence", quadrature_convergence),
)


def run_criteria(ctx: VerifyContext) -> List[Tuple[int, str, bool, str]]:
    results = []
    for number, (name, check) in enumerate(CRITERIA, start=1):
        try:
            passed, detail = check(ctx)
        except Exception as e:
            logger.exception(f"Criterion {number} ({name}) raised")
            passed, detail = False, f"{type(e).__name__}: {e}"
        logger.info(f"Criterion {number} ({name}): {'pass' if passed else 'FAIL'}")
        results.append((number, name, passed, detail))
    return results


def cmd_verify(config: RunConfig, quick: bool = False) -> int:
    """Print pass/fail per criterion; exit 0 iff every criterion passes"""
    results = run_criteria(VerifyContext(config, quick))
    for number, name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'}  {number:2d}. {name}: {detail}")
    return EXIT_OK if all(passed for _, _, passed, _ in results) else EXIT_FAILED
