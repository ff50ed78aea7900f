"""Solution quality metrics: per-bin utilization, F, and K.

F is the mean of squared bin utilizations over used bins; it rewards
polarized fill (bins either highly utilized or nearly empty).

K is (bins used - 1) plus the effective utilization R* of the least
utilized bin after a single horizontal or vertical guillotine cut
removes the empty reusable residual.  The cut orientation is chosen to
maximize the removed residual, i.e. to minimize the remaining rectangle;
R* is the remaining rectangle's share of the bin area.  (Under the
alternative literal reading, R* is simply the piece-area share of that
bin, which makes the cut irrelevant; it is kept behind ``literal=True``
for comparison.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .model import BinState, Solution


@dataclass(frozen=True)
class MetricReport:
    n_bins: int
    utilizations: tuple[float, ...]
    f_value: float
    k_value: float
    r_star: float


def utilization(bin_state: BinState, width: float, length: float) -> float:
    """Piece area over bin area; 0 for an empty bin."""
    return bin_state.occupied_area / (width * length)


def f_metric(solution: Solution) -> float:
    inst = solution.instance
    us = [utilization(b, inst.width, inst.length) for b in solution.bins]
    if not us:
        return 0.0
    return float(sum(u * u for u in us) / len(us))


def _least_utilized(solution: Solution) -> BinState:
    inst = solution.instance
    best = None
    best_u = None
    for b in solution.bins:
        u = utilization(b, inst.width, inst.length)
        # ties go to the highest index: the last-opened bin
        if best_u is None or u <= best_u:
            best, best_u = b, u
    return best


def k_metric(solution: Solution, width: float, length: float,
             literal: bool = False) -> tuple[float, float]:
    """(K, R*) of a complete feasible solution."""
    n = solution.n_bins
    if n == 0:
        return (0.0, 0.0)
    last = _least_utilized(solution)
    if literal:
        r_star = utilization(last, width, length)
        return (n - 1 + r_star, r_star)
    verts = np.concatenate(last.world_polys)
    x_hi = min(float(verts[:, 0].max()), width)
    y_hi = min(float(verts[:, 1].max()), length)
    x_hi = max(x_hi, 0.0)
    y_hi = max(y_hi, 0.0)
    remaining = min(width * y_hi, x_hi * length)  # horizontal vs vertical cut
    r_star = remaining / (width * length)
    return (n - 1 + r_star, r_star)


def report(solution: Solution, literal: bool = False) -> MetricReport:
    inst = solution.instance
    us = tuple(utilization(b, inst.width, inst.length) for b in solution.bins)
    k, r = k_metric(solution, inst.width, inst.length, literal=literal)
    return MetricReport(
        n_bins=solution.n_bins,
        utilizations=us,
        f_value=f_metric(solution),
        k_value=k,
        r_star=r,
    )
