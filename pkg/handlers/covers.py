import logging
from typing import List, Optional, Sequence, Tuple

from config.settings import RunConfig
from core.errors import InvalidParametersError
from core.models import CoverSpec, SurfaceType
from core.surface_model import CLAIM_COVERS, cover_type, punctured_base_type
from handlers.common import EXIT_CONFIG, EXIT_FAILED, EXIT_OK
from utils.tables import csv_line

logger = logging.getLogger(__name__)

HEADER = "l,k1,k2,a1,a2,q,g,n,b,base_g,base_n,base_b,expected,match"


def cover_rows(cases: Sequence[Tuple[CoverSpec, Optional[SurfaceType]]]) -> List[Tuple[str, bool]]:
    rows = []
    for spec, expected in cases:
        result = cover_type(spec)
        base = punctured_base_type(spec)
        match = expected is None or result == expected
        cells = [spec.l, spec.k1, spec.k2, spec.a1, spec.a2, spec.branch_count, *result.as_tuple(), *base.as_tuple()]
        expected_cell = "-" if expected is None else "({} {} {})".format(*expected.as_tuple())
        rows.append((csv_line([*cells, expected_cell, "yes" if match else "no"]), match))
    return rows


def cmd_cover_table(config: RunConfig, spec: Optional[Sequence[int]] = None) -> int:
    """Print the double-cover types used in the reduction (or one custom cover)"""
    try:
        cases = [(CoverSpec(*spec), None)] if spec else list(CLAIM_COVERS)
        rows = cover_rows(cases)
    except (InvalidParametersError, TypeError) as e:
        logger.error(f"Invalid cover data: {e}")
        return EXIT_CONFIG
    print(HEADER)
    for line, _ in rows:
        print(line)
    return EXIT_OK if all(match for _, match in rows) else EXIT_FAILED
