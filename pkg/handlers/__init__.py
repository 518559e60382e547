from .annulus import cmd_annulus_check
from .covers import cmd_cover_table
from .polygon import cmd_polygon
from .solve import cmd_solve
from .sweep import cmd_sweep
from .verify import cmd_verify

__all__ = [
    "cmd_polygon",
    "cmd_solve",
    "cmd_sweep",
    "cmd_verify",
    "cmd_annulus_check",
    "cmd_cover_table",
]
