"""Constructive solver for two-dimensional irregular bin packing.

Simple polygon pieces are packed into identical rectangular bins.  The
pipeline optionally merges geometrically compatible pieces into larger
composite pieces, then fills bins one at a time, largest pieces first,
scoring candidate positions by boundary adjacency.

Hot geometry kernels run on a compiled extension when available and fall
back to a pure-Python mirror (see :func:`kernel_backend`).
"""

from . import _kernels

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the geometry kernel backend in use."""
    return _kernels.impl.BACKEND


from .geometry import (  # noqa: E402
    DegeneratePolygon, Point, Polygon, Segment, Tolerance,
    bounding_box, interiors_overlap, max_slide, polygon_area, rotate,
    segment_overlap_len, translate,
)
from .model import (  # noqa: E402
    BinState, Instance, Piece, PositionTriplet, Solution, expand,
    realize, validate,
)
from .metrics import MetricReport, f_metric, k_metric, report, utilization  # noqa: E402
from .merge import FitnessBreakdown, MergeConfig, fitness, merge_all, try_merge_pair  # noqa: E402
from .placement import (  # noqa: E402
    CandidateSet, Engine, PlacementOutcome, bottom_left_place,
    bottom_right_place, build_candidates, place_group, score_position,
)
from .djd import (  # noqa: E402
    VARIANTS, DjdConfig, SolveResult, SolveStats, UnplaceablePieceError,
    enumerate_groups, fill_bin, solve,
)
from .gen import generate_cutting_instance  # noqa: E402

__all__ = [
    "__version__", "kernel_backend",
    "DegeneratePolygon", "Point", "Polygon", "Segment", "Tolerance",
    "bounding_box", "interiors_overlap", "max_slide", "polygon_area",
    "rotate", "segment_overlap_len", "translate",
    "BinState", "Instance", "Piece", "PositionTriplet", "Solution",
    "expand", "realize", "validate",
    "MetricReport", "f_metric", "k_metric", "report", "utilization",
    "FitnessBreakdown", "MergeConfig", "fitness", "merge_all", "try_merge_pair",
    "CandidateSet", "Engine", "PlacementOutcome", "bottom_left_place",
    "bottom_right_place", "build_candidates", "place_group", "score_position",
    "VARIANTS", "DjdConfig", "SolveResult", "SolveStats",
    "UnplaceablePieceError", "enumerate_groups", "fill_bin", "solve",
    "generate_cutting_instance",
]
