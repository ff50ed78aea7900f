"""Bin-filling driver and solver pipeline.

Bins are opened one at a time and filled in two phases.  Phase 1 walks
the remaining pieces largest-first and commits every piece the engine
can place, stopping once the bin is a third full.  Phase 2 tries ordered
groups of up to three distinct pieces under a rising waste allowance: a
group is committed only when it can be placed and brings the bin within
``waste`` of full; when no group qualifies the allowance grows by one
twentieth of the bin area.  All commitments are irrevocable.

The solver variants wire this driver to a placement engine and an
optional merge preprocessing stage:

=============  =======  =======
variant        engine   merge
=============  =======  =======
djd            CAD      no
mergedjd       ICAD     yes
merge-only     CAD      yes
icad-only      ICAD     no
=============  =======  =======
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .geometry import Tolerance
from .merge import MergeConfig, MergeEvent, merge_all
from .metrics import report
from .model import BinState, Instance, Piece, Solution, expand
from .placement import Engine, PlacementEnv


class UnplaceablePieceError(Exception):
    """Some piece cannot be placed in an empty bin under any rotation."""


VARIANTS: dict[str, tuple[Engine, bool]] = {
    "djd": (Engine.CAD, False),
    "mergedjd": (Engine.ICAD, True),
    "merge-only": (Engine.CAD, True),
    "icad-only": (Engine.ICAD, False),
}


@dataclass(frozen=True)
class DjdConfig:
    fill_fraction: float = 1.0 / 3.0
    waste_step_fraction: float = 1.0 / 20.0
    max_group_size: int = 3
    engine: Engine = Engine.ICAD
    merge_enabled: bool = True
    merge_threshold: float = 1.0
    # optional cap on phase-2 group evaluations per bin; None = unlimited
    group_eval_cap: Optional[int] = None

    def __post_init__(self):
        if not (0.0 < self.fill_fraction <= 1.0):
            raise ValueError("fill_fraction must be in (0, 1]")
        if not (0.0 < self.waste_step_fraction <= 1.0):
            raise ValueError("waste_step_fraction must be in (0, 1]")
        if self.max_group_size not in (1, 2, 3):
            raise ValueError("max_group_size must be 1, 2 or 3")

    @classmethod
    def for_variant(cls, variant: str, threshold: float = 1.0,
                    group_eval_cap: Optional[int] = None) -> "DjdConfig":
        try:
            engine, merged = VARIANTS[variant]
        except KeyError:
            raise ValueError(
                f"unknown variant {variant!r}; expected one of {sorted(VARIANTS)}"
            ) from None
        return cls(engine=engine, merge_enabled=merged,
                   merge_threshold=threshold, group_eval_cap=group_eval_cap)


@dataclass
class FillStats:
    waste_steps: int = 0
    group_evaluations: int = 0


def enumerate_groups(pieces: Sequence[Piece], k_max: int) -> Iterator[tuple[Piece, ...]]:
    """All ordered tuples of distinct pieces of sizes 1..k_max, in
    lexicographic order over the (area-sorted) piece indices."""
    n = len(pieces)
    for size in range(1, min(k_max, n) + 1):
        for idxs in itertools.permutations(range(n), size):
            yield tuple(pieces[i] for i in idxs)


def fill_bin(bin_state: BinState, pieces: Sequence[Piece], cfg: DjdConfig,
             rotations: Sequence[float], tol: Tolerance
             ) -> tuple[BinState, list[Piece], FillStats]:
    """Fill one (empty) bin from an area-sorted piece list.

    Returns the filled bin, the pieces still unplaced (order preserved)
    and fill statistics.
    """
    bin_area = bin_state.width * bin_state.length
    remaining = list(pieces)
    stats = FillStats()

    # phase 1: single pieces, largest first, until a third full
    env = PlacementEnv.for_bin(bin_state, cfg.engine, rotations, tol)
    for piece in list(remaining):
        got = env.place_one(piece)
        if got is None:
            continue
        t, _ = got
        bin_state = bin_state.with_placements([(piece, t)])
        env = env.extended_with_piece(piece, t)
        remaining.remove(piece)
        if bin_state.occupied_area >= cfg.fill_fraction * bin_area:
            break

    # phase 2: grouped fills under the waste schedule
    waste = 0.0
    area_eps = 1e-9 * bin_area
    cache: dict[tuple[str, ...], Optional[tuple[PlacementEnv, tuple]]] = {
        (): (env, ())}
    while waste < bin_area - bin_state.occupied_area:
        free = bin_area - bin_state.occupied_area
        need = free - waste
        committed_group = None
        for group in enumerate_groups(remaining, cfg.max_group_size):
            total = sum(p.area for p in group)
            if total < need - area_eps:
                continue                      # cannot reach the waste bound
            if total > free + area_eps:
                continue                      # cannot physically fit
            if cfg.group_eval_cap is not None and stats.group_evaluations >= cfg.group_eval_cap:
                break
            stats.group_evaluations += 1
            triplets = _group_outcome(cache, group)
            if triplets is not None:
                committed_group = (group, triplets)
                break
        if committed_group is None:
            if cfg.group_eval_cap is not None and stats.group_evaluations >= cfg.group_eval_cap:
                break
            waste += cfg.waste_step_fraction * bin_area
            stats.waste_steps += 1
            continue
        group, triplets = committed_group
        bin_state = bin_state.with_placements(list(zip(group, triplets)))
        dropped = {p.id for p in group}
        remaining = [p for p in remaining if p.id not in dropped]
        waste = 0.0
        env = PlacementEnv.for_bin(bin_state, cfg.engine, rotations, tol)
        cache = {(): (env, ())}
    return bin_state, remaining, stats


def _group_outcome(cache, group):
    """Placement of an ordered group against the cached prefix
    placements; placements depend only on the committed bin state and the
    group prefix, so prefixes are shared across groups."""
    ids = tuple(p.id for p in group)
    for k in range(1, len(ids) + 1):
        key = ids[:k]
        entry = cache.get(key, _MISSING)
        if entry is None:
            return None
        if entry is not _MISSING:
            continue
        parent = cache[ids[:k - 1]]
        parent_env, parent_triplets = parent
        got = parent_env.place_one(group[k - 1])
        if got is None:
            cache[key] = None
            return None
        t, _ = got
        cache[key] = (parent_env.extended_with_piece(group[k - 1], t),
                      parent_triplets + (t,))
    return cache[ids][1]


_MISSING = object()


@dataclass
class SolveStats:
    variant: str
    n_bins: int
    f_value: float
    k_value: float
    r_star: float
    utilizations: tuple[float, ...]
    merge_seconds: float
    total_seconds: float
    pieces_after_merge: int
    merge_groups: dict[str, list[str]] = field(default_factory=dict)
    merge_events: list[MergeEvent] = field(default_factory=list)
    waste_steps: int = 0
    group_evaluations: int = 0


@dataclass
class SolveResult:
    solution: Solution          # expanded: one triplet per atomic piece
    stats: SolveStats


def solve(instance: Instance, variant: str = "mergedjd", threshold: float = 1.0,
          cfg: Optional[DjdConfig] = None) -> SolveResult:
    """Run the full pipeline: optional merge, then bin-by-bin filling."""
    if cfg is None:
        cfg = DjdConfig.for_variant(variant, threshold)
    t0 = time.perf_counter()
    tol = instance.tol
    pieces: list[Piece] = list(instance.pieces)
    merge_seconds = 0.0
    merge_events: list[MergeEvent] = []
    if cfg.merge_enabled:
        m0 = time.perf_counter()
        mcfg = MergeConfig.for_instance(instance, cfg.merge_threshold)
        pieces, merge_events = merge_all(pieces, mcfg)
        merge_seconds = time.perf_counter() - m0
    pieces_after_merge = len(pieces)
    merge_groups = {p.id: [part.piece_id for part in p.parts]
                    for p in pieces if len(p.parts) > 1}

    remaining = sorted(pieces, key=lambda p: -p.area)
    bins: list[BinState] = []
    waste_steps = 0
    group_evals = 0
    index = 1
    while remaining:
        state = BinState.empty(index, instance.width, instance.length)
        state, remaining, fstats = fill_bin(state, remaining, cfg,
                                            instance.rotations, tol)
        waste_steps += fstats.waste_steps
        group_evals += fstats.group_evaluations
        if not state.placements:
            ids = ", ".join(p.id for p in remaining[:5])
            raise UnplaceablePieceError(
                f"no remaining piece fits an empty bin (first few: {ids})")
        bins.append(state)
        index += 1

    solution = expand(Solution(instance, tuple(bins)))
    rep = report(solution)
    stats = SolveStats(
        variant=variant,
        n_bins=rep.n_bins,
        f_value=rep.f_value,
        k_value=rep.k_value,
        r_star=rep.r_star,
        utilizations=rep.utilizations,
        merge_seconds=merge_seconds,
        total_seconds=time.perf_counter() - t0,
        pieces_after_merge=pieces_after_merge,
        merge_groups=merge_groups,
        merge_events=merge_events,
        waste_steps=waste_steps,
        group_evaluations=group_evals,
    )
    return SolveResult(solution=solution, stats=stats)
