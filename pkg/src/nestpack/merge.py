"""Piece-merge preprocessing.

Greedily combines pairs of pieces into composite pieces by overlapping
corner points: for each pair (larger piece fixed, smaller rotated
clockwise through the allowed angles) every vertex of one is brought
onto every vertex of the other, and the first contact pose that is
interior-disjoint, fits an empty bin's bounding box, and scores at least
the fitness threshold is accepted.  Successful merges replace the two
pieces and the scan restarts until a full pass produces no merge.

The fitness of a candidate is the equally weighted sum of three terms:
vertex-count reduction, squared edge-overlap ratios between the two
pieces' boundaries in the contact pose, and squared bounding-box fill of
the composite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels, geometry
from .geometry import Tolerance
from .model import Piece, combine


@dataclass(frozen=True)
class MergeConfig:
    threshold: float = 1.0
    rotations: tuple[float, ...] = (0.0, 90.0, 180.0, 270.0)
    bin_width: float = 1.0
    bin_length: float = 1.0
    tol: Tolerance = field(default_factory=Tolerance)

    @classmethod
    def for_instance(cls, instance, threshold: float = 1.0) -> "MergeConfig":
        return cls(threshold=threshold, rotations=instance.rotations,
                   bin_width=instance.width, bin_length=instance.length,
                   tol=instance.tol)


@dataclass(frozen=True)
class FitnessBreakdown:
    vertex_reduction: float
    edge_overlap: float
    rectangularity: float
    total: float


def distinct_vertex_count(piece: Piece, tol: Tolerance) -> int:
    """Vertices across all parts, deduplicated under eps coincidence."""
    return piece.distinct_vertex_count(tol.eps_abs)


def vertex_reduction(p1: Piece, p2: Piece, p12: Piece, tol: Tolerance) -> float:
    """max(0, max(|p1|, |p2|) - |p12|) over distinct vertex counts."""
    n1 = distinct_vertex_count(p1, tol)
    n2 = distinct_vertex_count(p2, tol)
    n12 = distinct_vertex_count(p12, tol)
    return float(max(0, max(n1, n2) - n12))


def edge_overlap(p1: Piece, p2: Piece, p12: Piece, tol: Tolerance) -> float:
    """Sum over boundary-segment pairs (one from each piece, in the
    composite pose) of squared overlap/longer-length ratios."""
    n1 = len(p1.polys)
    segs1 = np.concatenate([geometry.segments_array(v) for v in p12.polys[:n1]])
    segs2 = np.concatenate([geometry.segments_array(v) for v in p12.polys[n1:]])
    return float(_kernels.impl.pair_overlap_score(
        np.ascontiguousarray(segs1), 0.0, 0.0,
        np.ascontiguousarray(segs2), tol.eps_abs))


def rectangularity(p12: Piece) -> float:
    """Squared ratio of piece area to bounding-box area; 1 iff the piece
    fills its envelope exactly."""
    xmn, xmx, ymn, ymx = p12.bbox
    env = (xmx - xmn) * (ymx - ymn)
    r = p12.area / env
    return float(r * r)


def fitness(p1: Piece, p2: Piece, p12: Piece, tol: Tolerance) -> FitnessBreakdown:
    gv = vertex_reduction(p1, p2, p12, tol)
    gp = edge_overlap(p1, p2, p12, tol)
    gr = rectangularity(p12)
    return FitnessBreakdown(gv, gp, gr, gv + gp + gr)


@dataclass(frozen=True)
class MergeEvent:
    kept_id: str
    moved_id: str
    new_id: str
    rotation_cw: float
    translation: tuple[float, float]
    breakdown: FitnessBreakdown


def try_merge_pair(p_i: Piece, p_j: Piece, cfg: MergeConfig) -> Optional[tuple[Piece, MergeEvent]]:
    """First acceptable contact pose of p_j against p_i, or None.

    p_i stays fixed; p_j is rotated clockwise by each allowed angle, then
    translated so that each of its vertices in turn coincides with each
    vertex of p_i (p_i's vertices on the outer loop, stored order).
    """
    eps = cfg.tol.eps_abs
    overlap = _kernels.impl.poly_pair_overlap
    score = _kernels.impl.pair_overlap_score
    count_distinct = _kernels.impl.count_distinct_points
    pose_i = p_i.pose(0.0)
    vi_all = p_i.all_verts
    ixmn, ixmx, iymn, iymx = p_i.bbox
    n1 = distinct_vertex_count(p_i, cfg.tol)
    n2 = distinct_vertex_count(p_j, cfg.tol)
    area12 = p_i.area + p_j.area
    for alpha in cfg.rotations:
        pose_j = p_j.pose((-alpha) % 360.0)  # clockwise rotation
        vj_all = np.ascontiguousarray(np.concatenate(pose_j.pset.polys))
        jxmn, jxmx, jymn, jymx = geometry.bbox_of(vj_all)
        for a in range(vi_all.shape[0]):
            vix = float(vi_all[a, 0])
            viy = float(vi_all[a, 1])
            for b in range(vj_all.shape[0]):
                dx = vix - float(vj_all[b, 0])
                dy = viy - float(vj_all[b, 1])
                # composite bounding box must fit an empty bin
                w = max(ixmx, jxmx + dx) - min(ixmn, jxmn + dx)
                h = max(iymx, jymx + dy) - min(iymn, jymn + dy)
                if w > cfg.bin_width + eps or h > cfg.bin_length + eps:
                    continue
                hit = False
                for vi_poly, ip_i in zip(pose_i.pset.polys, pose_i.pset.ips):
                    for vj_poly, ip_j in zip(pose_j.pset.polys, pose_j.pset.ips):
                        if overlap(vi_poly, 0.0, 0.0, float(ip_i[0]), float(ip_i[1]),
                                   vj_poly, dx, dy, float(ip_j[0]), float(ip_j[1]),
                                   eps):
                            hit = True
                            break
                    if hit:
                        break
                if hit:
                    continue
                # fitness from the cached pose arrays; the composite piece
                # is only built on acceptance
                gr = (area12 / (w * h)) ** 2
                gp = float(score(pose_j.segs, dx, dy, pose_i.segs, eps))
                stacked = np.ascontiguousarray(
                    np.concatenate([vi_all, vj_all + np.array([dx, dy])]))
                n12 = int(count_distinct(stacked, eps))
                gv = float(max(0, max(n1, n2) - n12))
                total = gv + gp + gr
                if total >= cfg.threshold:
                    new_id = f"({p_i.id}+{p_j.id})"
                    candidate = combine(new_id, p_i, p_j, (-alpha) % 360.0, (dx, dy))
                    br = FitnessBreakdown(gv, gp, gr, total)
                    event = MergeEvent(p_i.id, p_j.id, new_id, alpha, (dx, dy), br)
                    return candidate, event
    return None


def merge_all(pieces, cfg: MergeConfig) -> tuple[list[Piece], list[MergeEvent]]:
    """Repeatedly merge the first acceptable pair until a full pass over
    the area-sorted working set yields no merge."""
    work = list(pieces)
    events: list[MergeEvent] = []
    while True:
        work.sort(key=lambda p: -p.area)
        merged = None
        n = len(work)
        for i in range(n - 1):
            # j scans from the smallest piece upward
            for j in range(n - 1, i, -1):
                got = try_merge_pair(work[i], work[j], cfg)
                if got is not None:
                    merged = (i, j, got)
                    break
            if merged is not None:
                break
        if merged is None:
            return work, events
        i, j, (piece, event) = merged
        del work[j]
        del work[i]
        work.append(piece)
        events.append(event)
