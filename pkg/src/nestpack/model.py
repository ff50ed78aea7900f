"""Problem and solution data model.

A :class:`Piece` is one or more simple polygons in a local frame whose
reference point (first vertex of the first polygon) sits at the origin.
Atomic pieces have a single part; composite pieces record every atomic
constituent with its pose inside the local frame, so a solution over
composite pieces can always be expanded back to the original pieces.

All model values are immutable after construction and safe to share;
solvers build solutions privately and publish them whole.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels, geometry
from .geometry import Point, Polygon, PolySet, Tolerance


class Part(NamedTuple):
    """One atomic constituent of a piece: shape plus pose in the piece's
    local frame (rotate counterclockwise about the origin, then translate)."""

    piece_id: str
    shape: np.ndarray          # (n, 2), first vertex at the origin
    rotation: float            # ccw degrees
    translation: tuple[float, float]


def _posed(part: Part) -> np.ndarray:
    verts = geometry.rotate_verts(part.shape, part.rotation, 0.0, 0.0)
    dx, dy = part.translation
    if dx != 0.0 or dy != 0.0:
        verts = verts + np.array([dx, dy])
    return np.ascontiguousarray(verts)


class Piece:
    """A packable piece; composite when it has more than one part."""

    __slots__ = ("id", "parts", "polys", "area", "_pose_cache", "_distinct_cache")

    def __init__(self, pid: str, parts: Sequence[Part]):
        if not parts:
            raise ValueError("piece needs at least one part")
        self.id = pid
        self.parts = tuple(parts)
        self.polys = tuple(_posed(p) for p in self.parts)
        ref = self.polys[0][0]
        if abs(float(ref[0])) > 1e-9 or abs(float(ref[1])) > 1e-9:
            raise ValueError(f"piece {pid!r}: reference point {ref} is not the origin")
        self.area = float(sum(_kernels.impl.poly_area(v) for v in self.polys))
        self._pose_cache: dict[float, "PiecePose"] = {}
        self._distinct_cache: tuple[float, int] | None = None

    @classmethod
    def atomic(cls, pid: str, verts) -> "Piece":
        arr = geometry.as_vertex_array(verts)
        return cls(pid, [Part(pid, arr, 0.0, (0.0, 0.0))])

    @property
    def kind(self) -> str:
        return "atomic" if len(self.parts) == 1 else "combined"

    @property
    def shape(self) -> Polygon:
        if len(self.polys) != 1:
            raise ValueError(f"piece {self.id!r} is composite; use .polys")
        return Polygon(self.polys[0])

    @property
    def n_vertices(self) -> int:
        return sum(v.shape[0] for v in self.polys)

    @cached_property
    def all_verts(self) -> np.ndarray:
        if len(self.polys) == 1:
            return self.polys[0]
        return np.ascontiguousarray(np.concatenate(self.polys))

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return geometry.bbox_of(self.all_verts)

    def distinct_vertex_count(self, eps: float) -> int:
        cached = self._distinct_cache
        if cached is not None and cached[0] == eps:
            return cached[1]
        n = int(_kernels.impl.count_distinct_points(self.all_verts, eps))
        self._distinct_cache = (eps, n)
        return n

    def pose(self, alpha: float) -> "PiecePose":
        """Flattened arrays for this piece rotated ccw by ``alpha`` about
        its reference point (cached per angle)."""
        key = alpha % 360.0
        got = self._pose_cache.get(key)
        if got is None:
            polys = [geometry.rotate_verts(v, key, 0.0, 0.0) for v in self.polys]
            got = PiecePose(self, key, polys)
            self._pose_cache[key] = got
        return got

    def __repr__(self) -> str:
        return f"Piece({self.id!r}, {self.kind}, area={self.area:g})"


class PiecePose:
    """A piece at a fixed rotation, flattened for the kernels."""

    __slots__ = ("piece", "alpha", "pset", "segs")

    def __init__(self, piece: Piece, alpha: float, polys: list[np.ndarray]):
        self.piece = piece
        self.alpha = alpha
        self.pset = PolySet(polys)
        self.segs = np.ascontiguousarray(
            np.concatenate([geometry.segments_array(v) for v in polys])
        )


def combine(new_id: str, fixed: Piece, moved: Piece,
            rotation_ccw: float, translation: tuple[float, float]) -> Piece:
    """Composite piece: ``fixed`` keeps its frame, ``moved`` is rotated
    ccw about its reference point and translated."""
    a = rotation_ccw % 360.0
    dx, dy = float(translation[0]), float(translation[1])
    parts = list(fixed.parts)
    for part in moved.parts:
        na = (part.rotation + a) % 360.0
        tv = geometry.rotate_verts(
            np.array([[part.translation[0], part.translation[1]]]), a, 0.0, 0.0
        )[0]
        parts.append(Part(part.piece_id, part.shape, na,
                          (float(tv[0]) + dx, float(tv[1]) + dy)))
    return Piece(new_id, parts)


@dataclass(frozen=True)
class PositionTriplet:
    """(bin index, translation vector, rotation angle): one placement
    decision.  Rotation (ccw degrees) precedes translation."""

    bin_index: int
    translation: tuple[float, float]
    rotation: float = 0.0

    def compose_part(self, part: Part) -> "PositionTriplet":
        # pose of an atomic constituent once its composite piece is placed
        tv = geometry.rotate_verts(
            np.array([[part.translation[0], part.translation[1]]]),
            self.rotation, 0.0, 0.0,
        )[0]
        return PositionTriplet(
            self.bin_index,
            (float(tv[0]) + self.translation[0], float(tv[1]) + self.translation[1]),
            (self.rotation + part.rotation) % 360.0,
        )


def realize(piece: Piece, t: PositionTriplet) -> tuple[Polygon, ...]:
    """World-coordinate polygons: rotate ccw about the reference point,
    then translate."""
    return tuple(Polygon(v) for v in realize_arrays(piece, t))


def realize_arrays(piece: Piece, t: PositionTriplet) -> list[np.ndarray]:
    dx, dy = t.translation
    shift = np.array([float(dx), float(dy)])
    out = []
    for v in piece.pose(t.rotation).pset.polys:
        out.append(np.ascontiguousarray(v + shift))
    return out


@dataclass(frozen=True)
class Instance:
    """A problem: pieces, bin size, allowed rotations, bin bound."""

    pieces: tuple[Piece, ...]
    width: float
    length: float
    rotations: tuple[float, ...] = (0.0, 90.0, 180.0, 270.0)
    bin_bound: int = 0
    tol: Tolerance = None  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self):
        if self.tol is None:
            object.__setattr__(self, "tol", Tolerance.for_bin(self.width, self.length))
        if self.bin_bound <= 0:
            object.__setattr__(self, "bin_bound", len(self.pieces))
        if self.bin_bound < len(self.pieces):
            raise ValueError("bin bound must be at least the piece count")
        ids = [p.id for p in self.pieces]
        if len(set(ids)) != len(ids):
            raise ValueError("piece ids must be unique")

    @cached_property
    def piece_by_id(self) -> dict[str, Piece]:
        return {p.id: p for p in self.pieces}

    @property
    def bin_dims(self) -> tuple[float, float]:
        return (self.width, self.length)

    def fits_empty_bin(self, piece: Piece) -> bool:
        """Some allowed rotation gives a bounding box within the bin."""
        eps = self.tol.eps_abs
        for alpha in self.rotations:
            xmn, xmx, ymn, ymx = geometry.bbox_of(
                np.concatenate(piece.pose(alpha).pset.polys)
            )
            if xmx - xmn <= self.width + eps and ymx - ymn <= self.length + eps:
                return True
        return False


@dataclass(frozen=True)
class BinState:
    """One bin: dimensions plus the committed placements inside it."""

    index: int
    width: float
    length: float
    placements: tuple[tuple[Piece, PositionTriplet], ...] = ()

    @classmethod
    def empty(cls, index: int, width: float, length: float) -> "BinState":
        return cls(index, width, length)

    @cached_property
    def occupied_area(self) -> float:
        return float(sum(p.area for p, _ in self.placements))

    @cached_property
    def piece_polys(self) -> tuple[tuple[np.ndarray, ...], ...]:
        """Realized polygons grouped per placed piece."""
        return tuple(tuple(realize_arrays(p, t)) for p, t in self.placements)

    @cached_property
    def world_polys(self) -> tuple[np.ndarray, ...]:
        out: list[np.ndarray] = []
        for group in self.piece_polys:
            out.extend(group)
        return tuple(out)

    def with_placements(self, new: Iterable[tuple[Piece, PositionTriplet]]) -> "BinState":
        return BinState(self.index, self.width, self.length,
                        self.placements + tuple(new))

    @property
    def utilization(self) -> float:
        return self.occupied_area / (self.width * self.length)


@dataclass(frozen=True)
class Solution:
    """A complete placement: one triplet per piece, bins used consecutively."""

    instance: Instance
    bins: tuple[BinState, ...]

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    @cached_property
    def triplets(self) -> dict[str, PositionTriplet]:
        out: dict[str, PositionTriplet] = {}
        for b in self.bins:
            for piece, t in b.placements:
                out[piece.id] = t
        return out


def expand(solution: Solution) -> Solution:
    """Resolve composite pieces to their atomic constituents.

    Each constituent's pose inside the composite is composed with the
    composite's triplet; the result records a triplet for every atomic
    piece and realizes to the same world geometry.
    """
    bins = []
    for b in solution.bins:
        placements: list[tuple[Piece, PositionTriplet]] = []
        for piece, t in b.placements:
            if len(piece.parts) == 1 and piece.parts[0].piece_id == piece.id:
                placements.append((piece, t))
                continue
            for part in piece.parts:
                atom = Piece.atomic(part.piece_id, part.shape)
                placements.append((atom, t.compose_part(part)))
        bins.append(BinState(b.index, b.width, b.length, tuple(placements)))
    return Solution(solution.instance, tuple(bins))


@dataclass(frozen=True)
class Violation:
    kind: str                      # out-of-bin | overlap | coverage | bin-order
    piece_ids: tuple[str, ...]
    bin_index: int
    detail: str

    def __str__(self) -> str:
        where = f" bin {self.bin_index}" if self.bin_index else ""
        return f"[{self.kind}]{where} {','.join(self.piece_ids)}: {self.detail}"


def validate(solution: Solution, instance: Instance,
             tol: Tolerance | None = None) -> list[Violation]:
    """Feasibility oracle: empty list iff the solution is feasible.

    Reports out-of-bin geometry, interior-overlapping pairs, coverage
    errors (missing/duplicate/unknown pieces) and non-consecutive bin
    usage, each with the offending ids.
    """
    tol = tol or instance.tol
    eps = tol.eps_abs
    W, L = instance.width, instance.length
    out: list[Violation] = []

    seen: dict[str, int] = {}
    for b in solution.bins:
        for piece, _ in b.placements:
            seen[piece.id] = seen.get(piece.id, 0) + 1
    want = {p.id for p in instance.pieces}
    for pid in sorted(want - seen.keys()):
        out.append(Violation("coverage", (pid,), 0, "piece not placed"))
    for pid in sorted(seen.keys() - want):
        out.append(Violation("coverage", (pid,), 0, "piece not in instance"))
    for pid, cnt in seen.items():
        if cnt > 1:
            out.append(Violation("coverage", (pid,), 0, f"placed {cnt} times"))

    prev = 0
    for b in solution.bins:
        if b.index != prev + 1:
            out.append(Violation("bin-order", (), b.index,
                                 f"bin {b.index} follows bin {prev}"))
        if not b.placements:
            out.append(Violation("bin-order", (), b.index, "bin is empty"))
        prev = b.index

    overlap = _kernels.impl.poly_pair_overlap
    for b in solution.bins:
        groups = b.piece_polys
        for (piece, _), polys in zip(b.placements, groups):
            for v in polys:
                xmn, xmx, ymn, ymx = geometry.bbox_of(v)
                if xmn < -eps or ymn < -eps or xmx > W + eps or ymx > L + eps:
                    out.append(Violation("out-of-bin", (piece.id,), b.index,
                                         f"bbox ({xmn:g},{xmx:g},{ymn:g},{ymx:g})"))
                    break
        n = len(b.placements)
        ips = [[geometry.interior_point(v) for v in polys] for polys in groups]
        for i in range(n):
            for j in range(i + 1, n):
                hit = False
                for vi, pi in zip(groups[i], ips[i]):
                    for vj, pj in zip(groups[j], ips[j]):
                        if overlap(vi, 0.0, 0.0, pi[0], pi[1],
                                   vj, 0.0, 0.0, pj[0], pj[1], eps):
                            hit = True
                            break
                    if hit:
                        break
                if hit:
                    out.append(Violation(
                        "overlap",
                        (b.placements[i][0].id, b.placements[j][0].id),
                        b.index, "interiors overlap"))
    return out
