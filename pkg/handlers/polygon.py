import logging
from typing import Optional, Sequence

from config.settings import RunConfig
from core.errors import ConfigError, InvalidParametersError
from core.models import LShapeParams
from core.surface_model import (
    decompose_annuli,
    double_surface,
    euler_characteristic,
    polyplane_point,
    twist_data,
)
from handlers.common import EXIT_CONFIG, EXIT_DEGENERATE, EXIT_OK, run_metadata, write_report
from utils.helpers import parse_rational

logger = logging.getLogger(__name__)


def polygon_report(params: LShapeParams, base: Optional[LShapeParams] = None) -> dict:
    """Vertices, areas, cone points and, for b > 0, annuli and twist data"""
    surface = double_surface(params)
    polygon = surface.polygon
    report = {
        "params": {"a": params.a, "b": params.b, "q": params.q},
        "vertices": {label: list(point) for label, point in polygon.vertices},
        "edges": dict(polygon.edge_lengths),
        "polygon_area": polygon.area,
        "surface_area": surface.area,
        "boundary_length": surface.boundary_length,
        "cone_points": {cone.label: {"angle_over_pi": cone.angle, "boundary": cone.on_boundary} for cone in surface.cone_points},
        "euler_characteristic": euler_characteristic(surface),
    }
    if params.is_degenerate:
        return report
    decomposition = decompose_annuli(params)
    report["annuli"] = {
        f"Pi_{ann.index}": {
            "circumference": ann.circumference,
            "height": ann.height,
            "modulus": ann.modulus,
            "area": ann.area,
            "alpha": ann.weight,
        }
        for ann in decomposition.annuli
    }
    if params.is_rational:
        twist = twist_data(params)
        report["twist"] = {"t": twist.t, "n": list(twist.exponents)}
    if base is not None and params.q == base.q:
        report["polyplane_point"] = list(polyplane_point(base, params))
    return report


def cmd_polygon(config: RunConfig, target: Optional[Sequence[str]] = None, twist: bool = False) -> int:
    """Emit the polygon and annulus report for the target (default: the base point)"""
    base = config.base.params
    try:
        params = LShapeParams(*(parse_rational(v) for v in target)) if target else base
    except (ConfigError, InvalidParametersError) as e:
        logger.error(f"Invalid target: {e}")
        return EXIT_CONFIG
    if twist and params.is_degenerate:
        logger.error(f"Twist data requested for degenerate {params}: psi has no annulus Pi_1")
        return EXIT_DEGENERATE

    report = polygon_report(params, base)
    report["metadata"] = run_metadata(config)
    write_report(report, config.output_dir, "polygon", config.output_format)
    if "annuli" in report:
        alphas = ", ".join(str(v["alpha"]) for v in report["annuli"].values())
        logger.info(f"Polygon {params}: area={report['polygon_area']} alpha=({alphas})")
    if "twist" in report:
        logger.info(f"Twist data: t={report['twist']['t']} n={tuple(report['twist']['n'])}")
    return EXIT_OK
