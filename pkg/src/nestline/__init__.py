"""Strip packing of irregular pieces with free rotations.

Pieces are decomposed into convex parts, seeded by a bottom-left raster
heuristic and then optimized as a smooth nonlinear program in which every
pair of parts from different pieces is kept apart by a movable line.
"""

__version__ = "0.1.0"

from .geometry import Piece, Placement, normalize_piece
from .instance import NestingInstance, parse_instance, write_instance
from .model import NlpProblem, build_problem, check_feasibility
from .seeding import generate_start
from .solver import SolverOptions, Status, multi_start, solve

__all__ = [
    "NestingInstance", "NlpProblem", "Piece", "Placement", "SolverOptions", "Status",
    "build_problem", "check_feasibility", "generate_start", "multi_start",
    "normalize_piece", "parse_instance", "solve", "write_instance",
]
