"""Synthetic cutting-instance generator.

Partitions ``n_bins`` bin-sized rectangles into ``n_pieces`` rectangles
with recursive guillotine cuts (seeded, deterministic).  Because every
piece is cut from a full bin, a perfect packing with all bins completely
filled exists by construction, which makes these instances suitable for
self-contained solver checks.
"""

from __future__ import annotations

import random

from .model import Instance, Piece

_MIN_FRAC = 0.3  # cut position range [0.3, 0.7] of the split span


def generate_cutting_instance(seed: int, n_bins: int, n_pieces: int,
                              width: float = 100.0, length: float = 100.0,
                              rotations=(0.0, 90.0, 180.0, 270.0),
                              name: str = "") -> Instance:
    if n_pieces < n_bins:
        raise ValueError("need at least one piece per bin")
    rng = random.Random(seed)
    # rectangles as (w, h); absolute positions are irrelevant to the pieces
    rects: list[tuple[float, float]] = [(width, length) for _ in range(n_bins)]
    while len(rects) < n_pieces:
        weights = [w * h for w, h in rects]
        idx = rng.choices(range(len(rects)), weights=weights)[0]
        w, h = rects.pop(idx)
        frac = rng.uniform(_MIN_FRAC, 1.0 - _MIN_FRAC)
        if w >= h:
            cut = w * frac
            rects.append((cut, h))
            rects.append((w - cut, h))
        else:
            cut = h * frac
            rects.append((w, cut))
            rects.append((w, h - cut))
    rng.shuffle(rects)
    pieces = []
    for i, (w, h) in enumerate(rects):
        pieces.append(Piece.atomic(
            f"p{i + 1:03d}",
            [[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]],
        ))
    return Instance(pieces=tuple(pieces), width=width, length=length,
                    rotations=tuple(rotations),
                    name=name or f"cut-s{seed}-b{n_bins}-n{n_pieces}")
