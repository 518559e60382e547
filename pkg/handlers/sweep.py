import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import RunConfig
from core.errors import FitError, LShapeError
from core.models import AsymptoticFit, BaseConfig, CollarSpec, PathPoint, SolverConfig
from core.paths import fit_asymptotics, rho, solve_path_point
from core.qc_twist import (
    collar_height,
    pair_twist_with_psi,
    pairing_parts,
    reference_bound,
    sample_beltrami,
    twist_for_point,
)
from handlers.common import EXIT_OK, EXIT_SWEEP, SWEEP_FAILURE_SHARE, run_metadata
from utils.tables import SweepTable

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "t",
    "lambda",
    "zeta",
    "r",
    "a",
    "b",
    "fol_proxy",
    "rho",
    "sup_mu",
    "abs_pair",
    "proxy_bound",
    "reference",
    "error",
)
FIT_COLUMNS = ("t_hi", "t_lo", "rho_variation", "beta1", "beta2", "beta2_variation")


@dataclass
class SweepResult:
    table: SweepTable
    fit_table: Optional[SweepTable]
    fit: Optional[AsymptoticFit]
    points: List[Optional[PathPoint]]
    metrics: List[Optional[Dict[str, float]]]
    collar: Optional[CollarSpec]
    errors: List[Optional[str]] = field(default_factory=list)

    @property
    def failure_share(self) -> float:
        return self.table.failure_count / max(1, len(self.table.rows))


def path_task(base: BaseConfig, solver: SolverConfig, t: float) -> Tuple[Optional[PathPoint], Optional[str]]:
    """Solve one path point; errors come back as text so the row can be kept"""
    try:
        return solve_path_point(base, t, solver), None
    except LShapeError as e:
        return None, f"{type(e).__name__}: {e}"


def collar_task(
    point: PathPoint, collar: CollarSpec, solver: SolverConfig
) -> Tuple[Optional[Dict[str, float]], Optional[str]]:
    """Beltrami and boundary-map diagnostics of the collar twist at one t"""
    try:
        bmap = twist_for_point(point, solver)
        field_ = sample_beltrami(bmap, collar)
        pairing = pair_twist_with_psi(field_)
        leading, remainder = pairing_parts(field_)
        return {
            "sup_mu": field_.sup_norm,
            "abs_pair": abs(pairing),
            "pair_imag": pairing.imag,
            "leading": leading,
            "remainder": remainder,
            "g_dev": float(np.max(np.abs(field_.g_values - field_.x))),
            "dg_dev": float(np.max(np.abs(field_.dg_values - 1.0))),
            "proxy_bound": field_.sup_norm ** 2 + abs(pairing),
            "reference": reference_bound(point.t),
        }, None
    except LShapeError as e:
        return None, f"{type(e).__name__}: {e}"


async def gather_tasks(func: Callable, arguments: Sequence[tuple], jobs: int) -> list:
    """Run func over the argument tuples, results in input order"""
    if jobs <= 1 or len(arguments) <= 1:
        return [func(*args) for args in arguments]
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [loop.run_in_executor(pool, partial(func, *args)) for args in arguments]
        return list(await asyncio.gather(*futures))


async def run_sweep_async(config: RunConfig) -> SweepResult:
    ts = [float(t) for t in config.t_values()]
    logger.info(f"Sweep over {len(ts)} values of t in [{ts[-1]:.3e}, {ts[0]:.3e}] with {config.jobs} workers")
    solved = await gather_tasks(path_task, [(config.base, config.solver, t) for t in ts], config.jobs)
    points = [point for point, _ in solved]
    errors = [error for _, error in solved]

    good = [p for p in points if p is not None]
    collar = None
    metrics: List[Optional[Dict[str, float]]] = [None] * len(ts)
    if good:
        collar = CollarSpec(collar_height(config.base, good), config.grid_nx, config.grid_ny)
        todo = [(i, p) for i, p in enumerate(points) if p is not None]
        results = await gather_tasks(collar_task, [(p, collar, config.solver) for _, p in todo], config.jobs)
        for (i, _), (values, error) in zip(todo, results):
            metrics[i] = values
            errors[i] = error

    metadata = run_metadata(config)
    metadata["collar_height"] = "nan" if collar is None else format(collar.height, ".17g")
    table = SweepTable("sweep", SWEEP_COLUMNS, metadata)
    for t, point, values, error in zip(ts, points, metrics, errors):
        if error is not None or point is None or values is None:
            logger.warning(f"Sweep row t={t:.3e} failed: {error}")
            table.add_failure(t, error or "unknown failure")
            continue
        table.add_row(
            {
                "t": t,
                "lambda": point.lam,
                "zeta": point.zeta,
                "r": point.r,
                "a": point.a,
                "b": point.b,
                "fol_proxy": point.fol_proxy,
                "rho": rho(point),
                "sup_mu": values["sup_mu"],
                "abs_pair": values["abs_pair"],
                "proxy_bound": values["proxy_bound"],
                "reference": values["reference"],
                "error": "",
            }
        )
        logger.info(f"t={t:.3e}: r={point.r:.6e} sup|mu|={values['sup_mu']:.3e}")

    fit, fit_table = None, None
    complete = [p for p, e in zip(points, errors) if p is not None and e is None]
    try:
        fit = fit_asymptotics(complete, float(config.base.a0))
        fit_meta = dict(metadata)
        fit_meta.update(
            {
                "c1": format(fit.c1, ".17g"),
                "beta1": format(fit.beta1, ".17g"),
                "beta2": format(fit.beta2, ".17g"),
                "residual_rms": format(fit.residual_rms, ".17g"),
            }
        )
        fit_table = SweepTable("fit", FIT_COLUMNS, fit_meta)
        decades = zip(fit.rho_variation, fit.beta1_by_decade, fit.beta2_by_decade)
        for (lo, hi, variation), (_, _, beta1), (_, _, beta2, spread) in decades:
            fit_table.add_row(
                {
                    "t_hi": hi,
                    "t_lo": lo,
                    "rho_variation": variation,
                    "beta1": beta1,
                    "beta2": beta2,
                    "beta2_variation": spread,
                }
            )
    except FitError as e:
        logger.warning(f"Asymptotic fit skipped: {e}")

    return SweepResult(
        table=table,
        fit_table=fit_table,
        fit=fit,
        points=points,
        metrics=metrics,
        collar=collar,
        errors=errors,
    )


def run_sweep(config: RunConfig) -> SweepResult:
    return asyncio.run(run_sweep_async(config))


def cmd_sweep(config: RunConfig) -> int:
    """Write the sweep table (and the fit table when the grid allows one)"""
    result = run_sweep(config)
    result.table.write(config.output_dir, config.output_format)
    if result.fit_table is not None:
        result.fit_table.write(config.output_dir, config.output_format)
    share = result.failure_share
    if share > SWEEP_FAILURE_SHARE:
        logger.error(f"{result.table.failure_count} of {len(result.table.rows)} sweep rows failed")
        return EXIT_SWEEP
    if share > 0:
        logger.warning(f"{result.table.failure_count} sweep rows failed")
    return EXIT_OK
