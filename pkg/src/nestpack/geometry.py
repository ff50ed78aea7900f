"""2D polygon kernel: transforms, predicates, segment overlap, axis slides.

Everything here is tolerance-based: predicates take a :class:`Tolerance`
whose ``eps_abs`` sets the geometric coincidence threshold and
``eps_slide`` the slide convergence threshold.  Boundary contact (shared
edges, touching vertices) never counts as overlap; the parts of a
composite piece touch by construction, so touching must be legal.

Values are immutable once constructed and all operations are pure
functions of their inputs.  Hot paths run on the kernel backend selected
in :mod:`nestpack._kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from ._kernels._pure import _proper_cross


class DegeneratePolygon(ValueError):
    """Polygon with (near-)zero area."""


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


@dataclass(frozen=True)
class Tolerance:
    """Geometric thresholds.

    ``eps_abs``: coincidence / penetration threshold (length units).
    ``eps_slide``: convergence threshold for sliding translations.
    """

    eps_abs: float = 1e-9
    eps_slide: float = 1e-9

    def __post_init__(self):
        if not (self.eps_abs > 0.0 and self.eps_slide > 0.0):
            raise ValueError("tolerances must be positive")

    @classmethod
    def for_bin(cls, width: float, length: float, rel: float = 1e-7) -> "Tolerance":
        # instances span coordinate magnitudes from ~10 to ~6000, so the
        # thresholds scale with the bin
        e = rel * max(width, length)
        return cls(eps_abs=e, eps_slide=e)


DEFAULT_TOLERANCE = Tolerance()


class Polygon:
    """Simple polygon as an ordered (n, 2) float64 vertex array.

    The first vertex is the reference point.  Vertex order is preserved
    as given; use :func:`ensure_ccw` to normalize orientation.
    """

    __slots__ = ("verts",)

    def __init__(self, verts):
        arr = np.ascontiguousarray(np.asarray(verts, dtype=np.float64))
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("polygon vertices must be an (n, 2) array")
        if arr.shape[0] < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if not np.isfinite(arr).all():
            raise ValueError("polygon vertices must be finite")
        self.verts = arr

    def __len__(self) -> int:
        return self.verts.shape[0]

    def __repr__(self) -> str:
        pts = ", ".join(f"({x:g}, {y:g})" for x, y in self.verts[:4])
        more = "" if len(self) <= 4 else f", ... {len(self)} verts"
        return f"Polygon([{pts}{more}])"

    @property
    def reference_point(self) -> Point:
        return Point(float(self.verts[0, 0]), float(self.verts[0, 1]))


# ---------------------------------------------------------------------------
# array helpers (module-internal but shared with model/placement)

def as_vertex_array(p) -> np.ndarray:
    if isinstance(p, Polygon):
        return p.verts
    return np.ascontiguousarray(np.asarray(p, dtype=np.float64))


def polys_of(obj) -> list[np.ndarray]:
    """Vertex arrays of a Polygon, a piece-like (``.polys``), a raw array,
    or a sequence of those."""
    if isinstance(obj, Polygon):
        return [obj.verts]
    if isinstance(obj, np.ndarray):
        return [as_vertex_array(obj)]
    if hasattr(obj, "polys"):
        return [as_vertex_array(p) for p in obj.polys]
    if isinstance(obj, (list, tuple)):
        out: list[np.ndarray] = []
        for item in obj:
            out.extend(polys_of(item))
        return out
    raise TypeError(f"cannot interpret {type(obj).__name__} as polygon(s)")


def signed_area(verts: np.ndarray) -> float:
    x = verts[:, 0]
    y = verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def ensure_ccw(verts: np.ndarray) -> np.ndarray:
    """Reverse vertex order if clockwise; the first vertex stays first."""
    if signed_area(verts) < 0.0:
        return np.ascontiguousarray(np.concatenate([verts[:1], verts[:0:-1]]))
    return verts


def bbox_of(verts: np.ndarray) -> tuple[float, float, float, float]:
    return (
        float(verts[:, 0].min()),
        float(verts[:, 0].max()),
        float(verts[:, 1].min()),
        float(verts[:, 1].max()),
    )


def interior_point(verts: np.ndarray) -> tuple[float, float]:
    """A point strictly inside a simple polygon.

    Takes the widest horizontal band between consecutive distinct vertex
    ordinates and returns the midpoint of the first crossing span, which
    lies in the interior for any simple polygon.
    """
    ys = sorted(set(float(y) for y in verts[:, 1]))
    best_gap = -1.0
    yc = float(verts[0, 1])
    for lo, hi in zip(ys, ys[1:]):
        if hi - lo > best_gap:
            best_gap = hi - lo
            yc = 0.5 * (lo + hi)
    if best_gap <= 0.0:
        return (float(verts[0, 0]), float(verts[0, 1]))
    xs = []
    n = verts.shape[0]
    ax, ay = float(verts[n - 1, 0]), float(verts[n - 1, 1])
    for i in range(n):
        bx, by = float(verts[i, 0]), float(verts[i, 1])
        if (ay > yc) != (by > yc):
            xs.append(ax + (yc - ay) * (bx - ax) / (by - ay))
        ax, ay = bx, by
    xs.sort()
    return (0.5 * (xs[0] + xs[1]), yc)


def segments_array(verts: np.ndarray) -> np.ndarray:
    """(n, 4) array of boundary segments (x1, y1, x2, y2), wrap-around."""
    nxt = np.roll(verts, -1, axis=0)
    return np.ascontiguousarray(np.hstack([verts, nxt]))


_EMPTY_VERTS = np.empty((0, 2), dtype=np.float64)
_EMPTY_OFFSETS = np.zeros(1, dtype=np.int64)
_EMPTY_BBOXES = np.empty((0, 4), dtype=np.float64)
_EMPTY_IPS = np.empty((0, 2), dtype=np.float64)


class PolySet:
    """A set of polygons flattened for the kernels.

    Holds the stacked vertex array, per-polygon offsets, bboxes and
    precomputed interior points.  Used both for the moving piece and for
    the fixed obstacles of a bin.
    """

    __slots__ = ("polys", "verts", "offsets", "bboxes", "ips", "count")

    def __init__(self, polys: Sequence[np.ndarray]):
        self.polys = [np.ascontiguousarray(np.asarray(p, dtype=np.float64)) for p in polys]
        self.count = len(self.polys)
        if self.count == 0:
            self.verts = _EMPTY_VERTS
            self.offsets = _EMPTY_OFFSETS
            self.bboxes = _EMPTY_BBOXES
            self.ips = _EMPTY_IPS
            return
        self.verts = np.ascontiguousarray(np.concatenate(self.polys))
        sizes = [p.shape[0] for p in self.polys]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.bboxes = np.ascontiguousarray(
            np.array([bbox_of(p) for p in self.polys], dtype=np.float64)
        )
        self.ips = np.ascontiguousarray(
            np.array([interior_point(p) for p in self.polys], dtype=np.float64)
        )

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        if self.count == 0:
            return (0.0, 0.0, 0.0, 0.0)
        return (
            float(self.bboxes[:, 0].min()),
            float(self.bboxes[:, 1].max()),
            float(self.bboxes[:, 2].min()),
            float(self.bboxes[:, 3].max()),
        )


EMPTY_POLYSET = PolySet([])


# ---------------------------------------------------------------------------
# operations

def polygon_area(p, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """Unsigned area; raises :class:`DegeneratePolygon` when ~zero."""
    polys = polys_of(p)
    total = 0.0
    for verts in polys:
        total += float(_kernels.impl.poly_area(verts))
    if total <= tol.eps_abs * tol.eps_abs:
        raise DegeneratePolygon(f"polygon area {total!r} is not positive")
    return total


def bounding_box(p) -> tuple[float, float, float, float]:
    """(x_min, x_max, y_min, y_max) over all vertices (all parts for a
    composite piece)."""
    polys = polys_of(p)
    verts = polys[0] if len(polys) == 1 else np.concatenate(polys)
    return bbox_of(verts)


def translate(p: Polygon, v) -> Polygon:
    dx, dy = float(v[0]), float(v[1])
    return Polygon(p.verts + np.array([dx, dy]))


def rotate_verts(verts: np.ndarray, alpha: float, cx: float, cy: float) -> np.ndarray:
    """Counterclockwise rotation by ``alpha`` degrees about (cx, cy).

    Quarter turns use exact coefficients so axis-aligned geometry stays
    bit-exact.
    """
    a = alpha % 360.0
    if a == 0.0:
        return verts.copy()
    if a == 90.0:
        c, s = 0.0, 1.0
    elif a == 180.0:
        c, s = -1.0, 0.0
    elif a == 270.0:
        c, s = 0.0, -1.0
    else:
        rad = math.radians(a)
        c, s = math.cos(rad), math.sin(rad)
    rx = verts[:, 0] - cx
    ry = verts[:, 1] - cy
    out = np.empty_like(verts)
    out[:, 0] = c * rx - s * ry + cx
    out[:, 1] = s * rx + c * ry + cy
    return np.ascontiguousarray(out)


def rotate(p: Polygon, alpha: float) -> Polygon:
    """Counterclockwise rotation about the polygon's reference point
    (its first vertex)."""
    cx, cy = float(p.verts[0, 0]), float(p.verts[0, 1])
    return Polygon(rotate_verts(p.verts, alpha, cx, cy))


def interiors_overlap(p, q, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff the open interiors intersect with penetration > eps_abs.

    Composite pieces are tested part by part; no boolean union is ever
    computed.
    """
    ap = polys_of(p)
    bp = polys_of(q)
    eps = tol.eps_abs
    overlap = _kernels.impl.poly_pair_overlap
    for va in ap:
        ipa = interior_point(va)
        for vb in bp:
            ipb = interior_point(vb)
            if overlap(va, 0.0, 0.0, ipa[0], ipa[1],
                       vb, 0.0, 0.0, ipb[0], ipb[1], eps):
                return True
    return False


def segment_overlap_len(e1: Segment, e2: Segment, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """1-D overlap length of two collinear-within-eps segments, else 0."""
    (ax, ay), (bx, by) = e1
    (cx, cy), (dx, dy) = e2
    return float(_kernels.impl.segment_overlap_len(
        float(ax), float(ay), float(bx), float(by),
        float(cx), float(cy), float(dx), float(dy), tol.eps_abs))


_AXIS_DIRECTIONS = {(0, -1), (0, 1), (-1, 0), (1, 0)}


def max_slide(piece, obstacles, bin_dims, direction, tol: Tolerance) -> float:
    """Largest displacement t >= 0 (within eps_slide) keeping the piece
    feasible when translated by t * direction.

    ``piece``: placed polygon(s) in world coordinates.  ``obstacles``:
    other placed polygons.  ``bin_dims``: (W, L).  ``direction``: one of
    the four axis unit vectors.
    """
    dx, dy = float(direction[0]), float(direction[1])
    if (round(dx), round(dy)) not in _AXIS_DIRECTIONS or abs(dx) + abs(dy) != 1.0:
        raise ValueError(f"direction must be an axis unit vector, got {direction!r}")
    pset = PolySet(polys_of(piece))
    oset = PolySet(polys_of(obstacles)) if obstacles else EMPTY_POLYSET
    W, L = float(bin_dims[0]), float(bin_dims[1])
    return max_slide_set(pset, 0.0, 0.0, (dx, dy), oset, W, L, tol)


def max_slide_set(pset: PolySet, pdx: float, pdy: float, direction,
                  obstacles: PolySet, W: float, L: float, tol: Tolerance) -> float:
    """Kernel-facing variant of :func:`max_slide` on prebuilt PolySets."""
    return float(_kernels.impl.max_slide(
        pset.verts, pset.offsets, pset.bboxes, pset.ips,
        pdx, pdy, float(direction[0]), float(direction[1]),
        obstacles.verts, obstacles.offsets, obstacles.bboxes, obstacles.ips,
        W, L, tol.eps_abs, tol.eps_slide))


def placement_feasible(pset: PolySet, dx: float, dy: float,
                       obstacles: PolySet, W: float, L: float, tol: Tolerance) -> bool:
    """Piece translated by (dx, dy) lies in the bin and overlaps nothing."""
    return bool(_kernels.impl.feasible(
        pset.verts, pset.offsets, pset.bboxes, pset.ips, dx, dy,
        obstacles.verts, obstacles.offsets, obstacles.bboxes, obstacles.ips,
        W, L, tol.eps_abs))


def is_simple_polygon(verts: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Simplicity check used at parse time: no repeated consecutive
    vertices, no proper self-crossing, no collinear edge overlap."""
    n = verts.shape[0]
    if n < 3:
        return False
    eps = tol.eps_abs
    pts = [(float(verts[i, 0]), float(verts[i, 1])) for i in range(n)]
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        if math.hypot(bx - ax, by - ay) <= eps:
            return False
    ov = _kernels.impl.segment_overlap_len
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        for j in range(i + 1, n):
            cx, cy = pts[j]
            ex, ey = pts[(j + 1) % n]
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            if not adjacent and _proper_cross(ax, ay, bx, by, cx, cy, ex, ey, eps):
                return False
            if ov(ax, ay, bx, by, cx, cy, ex, ey, eps) > eps:
                return False
    return True
