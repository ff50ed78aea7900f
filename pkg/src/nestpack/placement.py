"""Placement engines: candidate start points, bottom-left / bottom-right
sliding, and adjacency scoring.

A piece is placed by trying every candidate start point under every
allowed rotation: the reference point is put on the candidate, and if
that initial pose is feasible the piece is slid down-then-left (and,
for the improved engine, also down-then-right) until it cannot move.
Each resting position is scored by how much of the piece's boundary lies
flush against the bin walls and the already placed pieces (sum of
squared segment-overlap ratios); the highest score wins, first
encountered on ties.

The improved engine (ICAD) differs from the base engine (CAD) in two
ways: every realized vertex of a placed piece is also a candidate start
point (which reaches pockets of non-convex pieces), and the
down-then-right slide is evaluated alongside down-then-left.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _kernels, geometry
from .geometry import Point, PolySet, Tolerance
from .model import BinState, Piece, PiecePose, PositionTriplet, realize_arrays


class Engine(Enum):
    CAD = "cad"
    ICAD = "icad"


@dataclass(frozen=True)
class CandidateSet:
    """Deduplicated candidate start points, in insertion order."""

    points: tuple[Point, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class PlacementOutcome:
    ok: bool
    triplets: tuple[PositionTriplet, ...] = ()
    score: float = -1.0


_DOWN = (0.0, -1.0)
_LEFT = (-1.0, 0.0)
_RIGHT = (1.0, 0.0)


def _bin_segments(width: float, length: float) -> np.ndarray:
    return np.ascontiguousarray(np.array([
        [0.0, 0.0, width, 0.0],
        [width, 0.0, width, length],
        [width, length, 0.0, length],
        [0.0, length, 0.0, 0.0],
    ], dtype=np.float64))


def _append_candidates(cand: list[Point], pts, width: float, length: float,
                       eps: float) -> None:
    for x, y in pts:
        x = float(x)
        y = float(y)
        if x < -eps or x > width + eps or y < -eps or y > length + eps:
            continue
        x = min(max(x, 0.0), width)
        y = min(max(y, 0.0), length)
        dup = False
        for p in cand:
            dx = p.x - x
            dy = p.y - y
            if dx * dx + dy * dy <= eps * eps:
                dup = True
                break
        if not dup:
            cand.append(Point(x, y))


class PlacementEnv:
    """A bin plus (possibly tentative) placed pieces, flattened for the
    kernels.  Never mutated; ``extended_with_piece`` returns a new env."""

    __slots__ = ("bin_index", "width", "length", "engine", "rotations", "tol",
                 "poly_list", "obstacles", "env_segs", "cand")

    def __init__(self, bin_index, width, length, engine, rotations, tol,
                 poly_list, cand, env_segs):
        self.bin_index = bin_index
        self.width = width
        self.length = length
        self.engine = engine
        self.rotations = rotations
        self.tol = tol
        self.poly_list = poly_list
        self.obstacles = PolySet(poly_list)
        self.env_segs = env_segs
        self.cand = cand

    @classmethod
    def for_bin(cls, bin_state: BinState, engine: Engine,
                rotations: Sequence[float], tol: Tolerance) -> "PlacementEnv":
        W, L = bin_state.width, bin_state.length
        cand: list[Point] = []
        _append_candidates(cand, [(0.0, 0.0), (0.0, L), (W, 0.0), (W, L)],
                           W, L, tol.eps_abs)
        env = cls(bin_state.index, W, L, engine, tuple(rotations), tol,
                  [], cand, _bin_segments(W, L))
        for polys in bin_state.piece_polys:
            env = env._extended_with_polys(list(polys))
        return env

    def _extended_with_polys(self, polys: list[np.ndarray]) -> "PlacementEnv":
        new_list = self.poly_list + polys
        segs = np.concatenate(
            [self.env_segs] + [geometry.segments_array(v) for v in polys])
        cand = list(self.cand)
        all_v = polys[0] if len(polys) == 1 else np.concatenate(polys)
        xmn, xmx, ymn, ymx = geometry.bbox_of(all_v)
        pts = [(xmx, 0.0), (0.0, ymx), (xmn, ymx), (xmx, ymx), (xmx, ymn)]
        if self.engine is Engine.ICAD:
            pts.extend((float(x), float(y)) for x, y in all_v)
        _append_candidates(cand, pts, self.width, self.length, self.tol.eps_abs)
        return PlacementEnv(self.bin_index, self.width, self.length,
                            self.engine, self.rotations, self.tol,
                            new_list, cand, np.ascontiguousarray(segs))

    def extended_with_piece(self, piece: Piece, t: PositionTriplet) -> "PlacementEnv":
        return self._extended_with_polys(realize_arrays(piece, t))

    def _slide(self, pose: PiecePose, dx: float, dy: float, second) -> tuple[float, float]:
        tol = self.tol
        for _ in range(100):
            d1 = geometry.max_slide_set(pose.pset, dx, dy, _DOWN,
                                        self.obstacles, self.width, self.length, tol)
            dy -= d1
            d2 = geometry.max_slide_set(pose.pset, dx, dy, second,
                                        self.obstacles, self.width, self.length, tol)
            dx += second[0] * d2
            if d1 < tol.eps_slide and d2 < tol.eps_slide:
                break
        return dx, dy

    def score_at(self, pose: PiecePose, dx: float, dy: float) -> float:
        return float(_kernels.impl.pair_overlap_score(
            pose.segs, dx, dy, self.env_segs, self.tol.eps_abs))

    def place_one(self, piece: Piece) -> Optional[tuple[PositionTriplet, float]]:
        """Best-scoring resting position over all rotations, candidates
        and slide strategies; None when no initial pose is feasible."""
        best_score = -1.0
        best: Optional[tuple[float, tuple[float, float]]] = None
        for alpha in self.rotations:
            pose = piece.pose(alpha)
            for pt in self.cand:
                if not geometry.placement_feasible(
                        pose.pset, pt.x, pt.y, self.obstacles,
                        self.width, self.length, self.tol):
                    continue
                fx, fy = self._slide(pose, pt.x, pt.y, _LEFT)
                s = self.score_at(pose, fx, fy)
                if s > best_score:
                    best_score = s
                    best = (alpha, (fx, fy))
                if self.engine is Engine.ICAD:
                    fx, fy = self._slide(pose, pt.x, pt.y, _RIGHT)
                    s = self.score_at(pose, fx, fy)
                    if s > best_score:
                        best_score = s
                        best = (alpha, (fx, fy))
        if best is None:
            return None
        alpha, (fx, fy) = best
        return PositionTriplet(self.bin_index, (fx, fy), alpha), best_score


def build_candidates(bin_state: BinState, engine: Engine,
                     tol: Tolerance | None = None) -> CandidateSet:
    """Candidate start points for the next placement in this bin: the
    four bin corners, five bounding-box-derived points per placed piece,
    and (ICAD) every realized vertex of every placed piece; clipped to
    the bin and deduplicated."""
    tol = tol or Tolerance.for_bin(bin_state.width, bin_state.length)
    env = PlacementEnv.for_bin(bin_state, engine, (0.0,), tol)
    return CandidateSet(tuple(env.cand))


def bottom_left_place(bin_state: BinState, piece: Piece, start: Point,
                      alpha: float, tol: Tolerance | None = None
                      ) -> Optional[PositionTriplet]:
    """Slide down-then-left from a feasible start pose; None when the
    start pose itself is infeasible."""
    return _directional_place(bin_state, piece, start, alpha, _LEFT, tol)


def bottom_right_place(bin_state: BinState, piece: Piece, start: Point,
                       alpha: float, tol: Tolerance | None = None
                       ) -> Optional[PositionTriplet]:
    """Slide down-then-right from a feasible start pose."""
    return _directional_place(bin_state, piece, start, alpha, _RIGHT, tol)


def _directional_place(bin_state, piece, start, alpha, second, tol):
    tol = tol or Tolerance.for_bin(bin_state.width, bin_state.length)
    env = PlacementEnv.for_bin(bin_state, Engine.CAD, (alpha,), tol)
    pose = piece.pose(alpha)
    if not geometry.placement_feasible(pose.pset, float(start[0]), float(start[1]),
                                       env.obstacles, env.width, env.length, tol):
        return None
    fx, fy = env._slide(pose, float(start[0]), float(start[1]), second)
    return PositionTriplet(bin_state.index, (fx, fy), alpha)


def score_position(bin_state: BinState, piece: Piece, t: PositionTriplet,
                   tol: Tolerance | None = None) -> float:
    """Adjacency score of a feasible placement: sum over pairs of the
    piece's segments against the bin boundary and placed pieces'
    segments of squared overlap ratios."""
    tol = tol or Tolerance.for_bin(bin_state.width, bin_state.length)
    env = PlacementEnv.for_bin(bin_state, Engine.CAD, (t.rotation,), tol)
    return env.score_at(piece.pose(t.rotation), t.translation[0], t.translation[1])


def place_group(bin_state: BinState, group: Sequence[Piece], engine: Engine,
                rotations: Sequence[float], tol: Tolerance | None = None
                ) -> PlacementOutcome:
    """Place an ordered group, tentatively committing each member before
    the next; the caller decides whether to commit the outcome.

    ``bin_state`` is never modified.  Failure (some member has no
    feasible start pose) returns an outcome with ``ok=False``; the
    reported score is the placed-last member's best score.
    """
    tol = tol or Tolerance.for_bin(bin_state.width, bin_state.length)
    env = PlacementEnv.for_bin(bin_state, engine, rotations, tol)
    triplets: list[PositionTriplet] = []
    last_score = -1.0
    for piece in group:
        got = env.place_one(piece)
        if got is None:
            return PlacementOutcome(False)
        t, last_score = got
        triplets.append(t)
        env = env.extended_with_piece(piece, t)
    return PlacementOutcome(True, tuple(triplets), last_score)
