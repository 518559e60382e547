import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np
from dotenv import dotenv_values, load_dotenv

from core.errors import ConfigError, InvalidParametersError
from core.models import BaseConfig, QuadratureConfig, SolverConfig
from core.paths import t_grid
from utils.helpers import (
    config_hash,
    format_rational,
    parse_bool,
    parse_float,
    parse_int,
    parse_rational,
)

load_dotenv()

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("csv", "json")


class Settings:
    """Application settings"""

    # Base point of both paths (exact rationals)
    LSHAPE_A0: str = os.getenv("LSHAPE_A0", "1")
    LSHAPE_B0: str = os.getenv("LSHAPE_B0", "1")
    LSHAPE_Q0: str = os.getenv("LSHAPE_Q0", "1/2")

    # Sweep grid
    LSHAPE_T_MIN: str = os.getenv("LSHAPE_T_MIN", "1e-4")
    LSHAPE_T_MAX: str = os.getenv("LSHAPE_T_MAX", "1e-1")
    LSHAPE_T_COUNT: str = os.getenv("LSHAPE_T_COUNT", "24")
    LSHAPE_T_LOG: str = os.getenv("LSHAPE_T_LOG", "true")

    # Quadrature
    LSHAPE_QUAD_ABS_TOL: str = os.getenv("LSHAPE_QUAD_ABS_TOL", "1e-15")
    LSHAPE_QUAD_REL_TOL: str = os.getenv("LSHAPE_QUAD_REL_TOL", "1e-13")
    LSHAPE_QUAD_LIMIT: str = os.getenv("LSHAPE_QUAD_LIMIT", "200")
    LSHAPE_TAIL_CUTOFF: str = os.getenv("LSHAPE_TAIL_CUTOFF", "2")

    # Parameter solver
    LSHAPE_SOLVER_TOL: str = os.getenv("LSHAPE_SOLVER_TOL", "1e-10")
    LSHAPE_SOLVER_MAX_ITER: str = os.getenv("LSHAPE_SOLVER_MAX_ITER", "60")

    # Collar grid
    LSHAPE_GRID_NX: str = os.getenv("LSHAPE_GRID_NX", "256")
    LSHAPE_GRID_NY: str = os.getenv("LSHAPE_GRID_NY", "64")

    # Output
    LSHAPE_OUTPUT_DIR: str = os.getenv("LSHAPE_OUTPUT_DIR", "./output")
    LSHAPE_OUTPUT_FORMAT: str = os.getenv("LSHAPE_OUTPUT_FORMAT", "csv")
    LSHAPE_JOBS: str = os.getenv("LSHAPE_JOBS", "4")

    # Randomized checks
    LSHAPE_SEED: str = os.getenv("LSHAPE_SEED", "0")

    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    def as_dict(self) -> Dict[str, str]:
        return {name: getattr(self, name) for name in dir(type(self)) if name.isupper()}


settings = Settings()


@dataclass(frozen=True)
class RunConfig:
    """Fully parsed and validated configuration of one run"""

    base: BaseConfig
    t_min: float
    t_max: float
    t_count: int
    t_log: bool
    solver: SolverConfig
    grid_nx: int
    grid_ny: int
    output_dir: Path
    output_format: str
    jobs: int
    seed: int

    @property
    def quadrature(self) -> QuadratureConfig:
        return self.solver.quadrature

    def t_values(self) -> np.ndarray:
        return t_grid(self.t_min, self.t_max, self.t_count, self.t_log)

    def hash_payload(self) -> Dict[str, Any]:
        """Everything that changes the numbers; output location and worker count do not"""
        quad = self.quadrature
        return {
            "a0": format_rational(self.base.a0),
            "b0": format_rational(self.base.b0),
            "q0": format_rational(self.base.q0),
            "t_min": self.t_min,
            "t_max": self.t_max,
            "t_count": self.t_count,
            "t_log": self.t_log,
            "quad_abs_tol": quad.abs_tol,
            "quad_rel_tol": quad.rel_tol,
            "quad_limit": quad.limit,
            "tail_cutoff": quad.tail_cutoff,
            "solver_tol": self.solver.tol,
            "solver_max_iter": self.solver.max_iter,
            "grid_nx": self.grid_nx,
            "grid_ny": self.grid_ny,
        }

    @property
    def config_hash(self) -> str:
        return config_hash(self.hash_payload())


def read_config_file(path) -> Dict[str, str]:
    """KEY=VALUE file in dotenv syntax"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {key: value for key, value in values.items() if value is not None}


def _unit_interval(value: float, name: str) -> float:
    if not 0 < value < 1:
        raise ConfigError(f"{name} must lie in (0, 1), got {value}")
    return value


def build_run_config(values: Mapping[str, str]) -> RunConfig:
    """Parse and validate a merged KEY -> string mapping"""
    try:
        base = BaseConfig(
            parse_rational(values["LSHAPE_A0"]),
            parse_rational(values["LSHAPE_B0"]),
            parse_rational(values["LSHAPE_Q0"]),
        )
    except InvalidParametersError as e:
        raise ConfigError(str(e)) from e

    t_min = parse_float(values["LSHAPE_T_MIN"], "LSHAPE_T_MIN")
    t_max = parse_float(values["LSHAPE_T_MAX"], "LSHAPE_T_MAX")
    t_count = parse_int(values["LSHAPE_T_COUNT"], "LSHAPE_T_COUNT")
    if t_count < 1:
        raise ConfigError(f"LSHAPE_T_COUNT must be at least 1, got {t_count}")
    if not 0 < t_min <= t_max < base.q0:
        raise ConfigError(f"t-grid [{t_min}, {t_max}] must lie in (0, {format_rational(base.q0)})")
    if t_count > 1 and t_min == t_max:
        raise ConfigError("a grid of several points needs t_min < t_max")

    try:
        quadrature = QuadratureConfig(
            abs_tol=_unit_interval(parse_float(values["LSHAPE_QUAD_ABS_TOL"], "LSHAPE_QUAD_ABS_TOL"), "LSHAPE_QUAD_ABS_TOL"),
            rel_tol=_unit_interval(parse_float(values["LSHAPE_QUAD_REL_TOL"], "LSHAPE_QUAD_REL_TOL"), "LSHAPE_QUAD_REL_TOL"),
            limit=parse_int(values["LSHAPE_QUAD_LIMIT"], "LSHAPE_QUAD_LIMIT"),
            tail_cutoff=parse_float(values["LSHAPE_TAIL_CUTOFF"], "LSHAPE_TAIL_CUTOFF"),
        )
        solver = SolverConfig(
            tol=_unit_interval(parse_float(values["LSHAPE_SOLVER_TOL"], "LSHAPE_SOLVER_TOL"), "LSHAPE_SOLVER_TOL"),
            max_iter=parse_int(values["LSHAPE_SOLVER_MAX_ITER"], "LSHAPE_SOLVER_MAX_ITER"),
            quadrature=quadrature,
        )
    except InvalidParametersError as e:
        raise ConfigError(str(e)) from e

    grid_nx = parse_int(values["LSHAPE_GRID_NX"], "LSHAPE_GRID_NX")
    grid_ny = parse_int(values["LSHAPE_GRID_NY"], "LSHAPE_GRID_NY")
    if grid_nx < 16 or grid_ny < 16:
        raise ConfigError(f"collar grid needs at least 16 nodes per direction, got {grid_nx}x{grid_ny}")

    output_format = str(values["LSHAPE_OUTPUT_FORMAT"]).strip().lower()
    if output_format not in OUTPUT_FORMATS:
        raise ConfigError(f"output format must be one of {OUTPUT_FORMATS}, got {output_format!r}")
    jobs = parse_int(values["LSHAPE_JOBS"], "LSHAPE_JOBS")
    if jobs < 1:
        raise ConfigError(f"LSHAPE_JOBS must be at least 1, got {jobs}")

    return RunConfig(
        base=base,
        t_min=t_min,
        t_max=t_max,
        t_count=t_count,
        t_log=parse_bool(values["LSHAPE_T_LOG"], "LSHAPE_T_LOG"),
        solver=solver,
        grid_nx=grid_nx,
        grid_ny=grid_ny,
        output_dir=Path(values["LSHAPE_OUTPUT_DIR"]),
        output_format=output_format,
        jobs=jobs,
        seed=parse_int(values["LSHAPE_SEED"], "LSHAPE_SEED"),
    )


def load_run_config(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environment: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """Settings defaults and environment, then the --config file, then explicit flags"""
    values = settings.as_dict()
    values.update(environment or {})
    if config_path:
        file_values = read_config_file(config_path)
        logger.debug(f"Loaded {len(file_values)} keys from {config_path}")
        values.update(file_values)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = str(value)
    return build_run_config(values)


__all__ = ["Settings", "settings", "RunConfig", "load_run_config", "build_run_config"]
