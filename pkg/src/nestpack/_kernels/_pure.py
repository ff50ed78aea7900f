"""Pure-Python geometry kernels.

Reference implementation of the hot-path primitives used by the solver:
overlap predicates, segment overlap lengths, feasibility tests and axis
slides.  ``_fast.pyx`` is a transliteration of this module; both
backends must produce identical results, so any change here has to be
mirrored there (same expressions, same evaluation order).

Conventions shared by both backends:

* polygons are (n, 2) float64 arrays of vertices, n >= 3;
* multi-polygon "sets" are passed flattened: a stacked vertex array, an
  int64 offsets array of length k+1, per-polygon bboxes (k, 4) laid out
  as (xmin, xmax, ymin, ymax), and per-polygon interior points (k, 2)
  precomputed by the caller (interior points translate rigidly with the
  polygon, so they can be cached);
* "interiors overlap" means penetration depth greater than ``eps``;
  boundary contact does not count.
"""

from __future__ import annotations

from math import sqrt

BACKEND = "pure"

_INF = float("inf")


def poly_area(verts):
    """Unsigned polygon area (half the absolute shoelace sum)."""
    n = verts.shape[0]
    acc = 0.0
    x0 = float(verts[n - 1, 0])
    y0 = float(verts[n - 1, 1])
    for i in range(n):
        x1 = float(verts[i, 0])
        y1 = float(verts[i, 1])
        acc += x0 * y1 - x1 * y0
        x0 = x1
        y0 = y1
    return abs(acc) * 0.5


def _ring(verts, dx, dy):
    n = verts.shape[0]
    return [(float(verts[i, 0]) + dx, float(verts[i, 1]) + dy) for i in range(n)]


def _pip(px, py, ring):
    # even-odd rule; half-open on the vertex ordinates so shared vertices
    # are counted once
    inside = False
    n = len(ring)
    xj, yj = ring[n - 1]
    for i in range(n):
        xi, yi = ring[i]
        if (yi > py) != (yj > py):
            xint = xi + (py - yi) * (xj - xi) / (yj - yi)
            if px < xint:
                inside = not inside
        xj, yj = xi, yi
    return inside


def _dseg(px, py, ax, ay, bx, by):
    ux = bx - ax
    uy = by - ay
    l2 = ux * ux + uy * uy
    if l2 <= 0.0:
        dx = px - ax
        dy = py - ay
        return sqrt(dx * dx + dy * dy)
    t = ((px - ax) * ux + (py - ay) * uy) / l2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    dx = px - (ax + t * ux)
    dy = py - (ay + t * uy)
    return sqrt(dx * dx + dy * dy)


def _dist_boundary(px, py, ring):
    n = len(ring)
    best = _INF
    ax, ay = ring[n - 1]
    for i in range(n):
        bx, by = ring[i]
        d = _dseg(px, py, ax, ay, bx, by)
        if d < best:
            best = d
        ax, ay = bx, by
    return best


def _strictly_inside(px, py, ring, eps):
    return _dist_boundary(px, py, ring) > eps and _pip(px, py, ring)


def _proper_cross(ax, ay, bx, by, cx, cy, dx, dy, eps):
    # transversal crossing with every endpoint more than eps off the other
    # supporting line; grazing and collinear contacts do not qualify
    ux = bx - ax
    uy = by - ay
    vx = dx - cx
    vy = dy - cy
    l1 = sqrt(ux * ux + uy * uy)
    l2 = sqrt(vx * vx + vy * vy)
    if l1 <= eps or l2 <= eps:
        return False
    dc = (ux * (cy - ay) - uy * (cx - ax)) / l1
    dd = (ux * (dy - ay) - uy * (dx - ax)) / l1
    if not ((dc > eps and dd < -eps) or (dc < -eps and dd > eps)):
        return False
    da = (vx * (ay - cy) - vy * (ax - cx)) / l2
    db = (vx * (by - cy) - vy * (bx - cx)) / l2
    return (da > eps and db < -eps) or (da < -eps and db > eps)


def _edge_penetrates(ring_a, ring_b, eps):
    """True when some boundary edge of A runs through the interior of B.

    For each edge of A, every parameter at which the edge meets B's
    boundary (transversal intersections and collinear overlap endpoints)
    splits it into sub-segments; a sub-segment midpoint strictly inside B
    witnesses penetration.  Subsumes plain edge-crossing tests and also
    catches overlap regions bounded only by vertex-on-edge contacts.
    """
    na = len(ring_a)
    nb = len(ring_b)
    ax, ay = ring_a[na - 1]
    for i in range(na):
        bx, by = ring_a[i]
        ux = bx - ax
        uy = by - ay
        la = sqrt(ux * ux + uy * uy)
        if la <= eps:
            ax, ay = bx, by
            continue
        ux /= la
        uy /= la
        ts = [0.0, la]
        cx, cy = ring_b[nb - 1]
        for j in range(nb):
            ex, ey = ring_b[j]
            wx = ex - cx
            wy = ey - cy
            lw = sqrt(wx * wx + wy * wy)
            denom = ux * wy - uy * wx
            if abs(denom) <= lw * eps:
                # parallel; contributes only when collinear within eps
                if abs(ux * (cy - ay) - uy * (cx - ax)) <= eps:
                    t1 = ux * (cx - ax) + uy * (cy - ay)
                    t2 = ux * (ex - ax) + uy * (ey - ay)
                    if t1 > t2:
                        t1, t2 = t2, t1
                    if t2 >= -eps and t1 <= la + eps:
                        ts.append(min(max(t1, 0.0), la))
                        ts.append(min(max(t2, 0.0), la))
            else:
                rx = cx - ax
                ry = cy - ay
                t = (rx * wy - ry * wx) / denom
                s = (rx * uy - ry * ux) / denom
                if -eps <= t <= la + eps and -eps <= s * lw <= lw + eps:
                    ts.append(min(max(t, 0.0), la))
            cx, cy = ex, ey
        ts.sort()
        prev = ts[0]
        for t in ts[1:]:
            if t - prev > eps:
                mx = ax + ux * (prev + t) * 0.5
                my = ay + uy * (prev + t) * 0.5
                if _strictly_inside(mx, my, ring_b, eps):
                    return True
            prev = t
        ax, ay = bx, by
    return False


def poly_pair_overlap(averts, adx, ady, aipx, aipy, bverts, bdx, bdy, bipx, bipy, eps):
    """True iff the open interiors of two simple polygons overlap by > eps.

    ``(adx, ady)`` / ``(bdx, bdy)`` rigidly translate each polygon;
    ``(aipx, aipy)`` / ``(bipx, bipy)`` are interior points in the
    polygons' own (untranslated) frames.
    """
    ring_a = _ring(averts, adx, ady)
    ring_b = _ring(bverts, bdx, bdy)

    axmin = aymin = _INF
    axmax = aymax = -_INF
    for x, y in ring_a:
        if x < axmin:
            axmin = x
        if x > axmax:
            axmax = x
        if y < aymin:
            aymin = y
        if y > aymax:
            aymax = y
    bxmin = bymin = _INF
    bxmax = bymax = -_INF
    for x, y in ring_b:
        if x < bxmin:
            bxmin = x
        if x > bxmax:
            bxmax = x
        if y < bymin:
            bymin = y
        if y > bymax:
            bymax = y
    if min(axmax, bxmax) - max(axmin, bxmin) < eps:
        return False
    if min(aymax, bymax) - max(aymin, bymin) < eps:
        return False

    for px, py in ring_a:
        if _strictly_inside(px, py, ring_b, eps):
            return True
    for px, py in ring_b:
        if _strictly_inside(px, py, ring_a, eps):
            return True

    if _edge_penetrates(ring_a, ring_b, eps):
        return True
    if _edge_penetrates(ring_b, ring_a, eps):
        return True

    # containment (covers identical coverage and inscribed cases)
    if _strictly_inside(aipx + adx, aipy + ady, ring_b, eps):
        return True
    if _strictly_inside(bipx + bdx, bipy + bdy, ring_a, eps):
        return True
    return False


def segment_overlap_len(ax, ay, bx, by, cx, cy, dx, dy, eps):
    """Length of the 1-D overlap of two collinear-within-eps segments.

    0.0 when the segments are not collinear within eps (angular deviation
    or point-to-line distance above eps) or touch in at most a point.
    """
    ux = bx - ax
    uy = by - ay
    vx = dx - cx
    vy = dy - cy
    l1 = sqrt(ux * ux + uy * uy)
    l2 = sqrt(vx * vx + vy * vy)
    if l1 <= eps or l2 <= eps:
        return 0.0
    sin_dev = abs(ux * vy - uy * vx) / (l1 * l2)
    if sin_dev > eps:
        return 0.0
    if abs(ux * (cy - ay) - uy * (cx - ax)) / l1 > eps:
        return 0.0
    if abs(ux * (dy - ay) - uy * (dx - ax)) / l1 > eps:
        return 0.0
    tc = (ux * (cx - ax) + uy * (cy - ay)) / l1
    td = (ux * (dx - ax) + uy * (dy - ay)) / l1
    if tc > td:
        tc, td = td, tc
    hi = td if td < l1 else l1
    lo = tc if tc > 0.0 else 0.0
    out = hi - lo
    return out if out > 0.0 else 0.0


def pair_overlap_score(segs_a, sadx, sady, segs_b, eps):
    """Sum over segment pairs of squared (overlap / longer length) ratios.

    ``segs_*`` are (n, 4) arrays of (x1, y1, x2, y2); ``(sadx, sady)``
    rigidly translates the first set.
    """
    na = segs_a.shape[0]
    nb = segs_b.shape[0]
    total = 0.0
    for i in range(na):
        ax = float(segs_a[i, 0]) + sadx
        ay = float(segs_a[i, 1]) + sady
        bx = float(segs_a[i, 2]) + sadx
        by = float(segs_a[i, 3]) + sady
        dxa = bx - ax
        dya = by - ay
        la = sqrt(dxa * dxa + dya * dya)
        for j in range(nb):
            cx = float(segs_b[j, 0])
            cy = float(segs_b[j, 1])
            ex = float(segs_b[j, 2])
            ey = float(segs_b[j, 3])
            ol = segment_overlap_len(ax, ay, bx, by, cx, cy, ex, ey, eps)
            if ol > 0.0:
                dxb = ex - cx
                dyb = ey - cy
                lb = sqrt(dxb * dxb + dyb * dyb)
                denom = la if la > lb else lb
                r = ol / denom
                total += r * r
    return total


def count_distinct_points(pts, eps):
    """Number of points distinct under eps coincidence (euclidean)."""
    n = pts.shape[0]
    count = 0
    for i in range(n):
        xi = float(pts[i, 0])
        yi = float(pts[i, 1])
        dup = False
        for j in range(i):
            dx = xi - float(pts[j, 0])
            dy = yi - float(pts[j, 1])
            if sqrt(dx * dx + dy * dy) <= eps:
                dup = True
                break
        if not dup:
            count += 1
    return count


def feasible(pverts, poff, pbb, pips, dx, dy, overts, ooff, obb, oips, W, L, eps):
    """Piece (flattened polygon set) translated by (dx, dy) fits the bin
    [0, W] x [0, L] and does not interior-overlap any obstacle polygon."""
    m = poff.shape[0] - 1
    xmn = ymn = _INF
    xmx = ymx = -_INF
    for p in range(m):
        if float(pbb[p, 0]) < xmn:
            xmn = float(pbb[p, 0])
        if float(pbb[p, 1]) > xmx:
            xmx = float(pbb[p, 1])
        if float(pbb[p, 2]) < ymn:
            ymn = float(pbb[p, 2])
        if float(pbb[p, 3]) > ymx:
            ymx = float(pbb[p, 3])
    if xmn + dx < -eps or ymn + dy < -eps:
        return False
    if xmx + dx > W + eps or ymx + dy > L + eps:
        return False
    k = ooff.shape[0] - 1
    if k == 0:
        return True
    for p in range(m):
        pxmn = float(pbb[p, 0]) + dx
        pxmx = float(pbb[p, 1]) + dx
        pymn = float(pbb[p, 2]) + dy
        pymx = float(pbb[p, 3]) + dy
        for kb in range(k):
            if min(pxmx, float(obb[kb, 1])) - max(pxmn, float(obb[kb, 0])) < eps:
                continue
            if min(pymx, float(obb[kb, 3])) - max(pymn, float(obb[kb, 2])) < eps:
                continue
            if poly_pair_overlap(
                pverts[poff[p]:poff[p + 1]],
                dx,
                dy,
                float(pips[p, 0]),
                float(pips[p, 1]),
                overts[ooff[kb]:ooff[kb + 1]],
                0.0,
                0.0,
                float(oips[kb, 0]),
                float(oips[kb, 1]),
                eps,
            ):
                return False
    return True


def max_slide(pverts, poff, pbb, pips, pdx, pdy, dirx, diry,
              overts, ooff, obb, oips, W, L, eps_abs, eps_slide):
    """Largest displacement t (within eps_slide) such that the piece,
    currently translated by (pdx, pdy), stays feasible when moved by
    t * (dirx, diry).  Direction must be one of the four axis units.

    Found by bisection on the feasibility predicate, then snapped to a
    nearby exact wall / obstacle-bbox alignment when one exists (so that
    flush contacts land on exact coordinates).
    """
    m = poff.shape[0] - 1
    xmn = ymn = _INF
    xmx = ymx = -_INF
    for p in range(m):
        if float(pbb[p, 0]) < xmn:
            xmn = float(pbb[p, 0])
        if float(pbb[p, 1]) > xmx:
            xmx = float(pbb[p, 1])
        if float(pbb[p, 2]) < ymn:
            ymn = float(pbb[p, 2])
        if float(pbb[p, 3]) > ymx:
            ymx = float(pbb[p, 3])
    xmn += pdx
    xmx += pdx
    ymn += pdy
    ymx += pdy

    if dirx < -0.5:
        ub = xmn
    elif dirx > 0.5:
        ub = W - xmx
    elif diry < -0.5:
        ub = ymn
    else:
        ub = L - ymx
    if ub <= 0.0:
        return 0.0
    if feasible(pverts, poff, pbb, pips, pdx + dirx * ub, pdy + diry * ub,
                overts, ooff, obb, oips, W, L, eps_abs):
        return ub

    lo = 0.0
    hi = ub
    it = 0
    while hi - lo > eps_slide * 0.25 and it < 64:
        mid = 0.5 * (lo + hi)
        if feasible(pverts, poff, pbb, pips, pdx + dirx * mid, pdy + diry * mid,
                    overts, ooff, obb, oips, W, L, eps_abs):
            lo = mid
        else:
            hi = mid
        it += 1

    window = 4.0 * (eps_abs if eps_abs > eps_slide else eps_slide)
    cands = []
    if abs(ub - lo) <= window:
        cands.append(ub)
    k = ooff.shape[0] - 1
    for kb in range(k):
        if dirx < -0.5:
            tk = xmn - float(obb[kb, 1])
        elif dirx > 0.5:
            tk = float(obb[kb, 0]) - xmx
        elif diry < -0.5:
            tk = ymn - float(obb[kb, 3])
        else:
            tk = float(obb[kb, 2]) - ymx
        if 0.0 <= tk <= ub and abs(tk - lo) <= window:
            cands.append(tk)
    cands.sort(reverse=True)
    for tk in cands:
        if feasible(pverts, poff, pbb, pips, pdx + dirx * tk, pdy + diry * tk,
                    overts, ooff, obb, oips, W, L, eps_abs):
            return tk
    return lo
