# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled geometry kernels.

Transliteration of ``_pure.py``; see that module for the shared
conventions.  Both backends must produce identical results.
"""

from libc.math cimport sqrt, fabs
from libc.stdlib cimport free, malloc

BACKEND = "compiled"

cdef double _INF = float("inf")


def poly_area(double[:, ::1] verts):
    """Unsigned polygon area (half the absolute shoelace sum)."""
    cdef Py_ssize_t n = verts.shape[0]
    cdef Py_ssize_t i
    cdef double acc = 0.0
    cdef double x0 = verts[n - 1, 0]
    cdef double y0 = verts[n - 1, 1]
    cdef double x1, y1
    for i in range(n):
        x1 = verts[i, 0]
        y1 = verts[i, 1]
        acc += x0 * y1 - x1 * y0
        x0 = x1
        y0 = y1
    return fabs(acc) * 0.5


cdef bint _pip(double px, double py, double[:, ::1] V, double dx, double dy) noexcept:
    cdef bint inside = False
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t i
    cdef double xj = V[n - 1, 0] + dx
    cdef double yj = V[n - 1, 1] + dy
    cdef double xi, yi, xint
    for i in range(n):
        xi = V[i, 0] + dx
        yi = V[i, 1] + dy
        if (yi > py) != (yj > py):
            xint = xi + (py - yi) * (xj - xi) / (yj - yi)
            if px < xint:
                inside = not inside
        xj = xi
        yj = yi
    return inside


cdef double _dseg(double px, double py, double ax, double ay, double bx, double by) noexcept:
    cdef double ux = bx - ax
    cdef double uy = by - ay
    cdef double l2 = ux * ux + uy * uy
    cdef double t, dx, dy
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


cdef double _dist_boundary(double px, double py, double[:, ::1] V, double dx, double dy) noexcept:
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t i
    cdef double best = _INF
    cdef double ax = V[n - 1, 0] + dx
    cdef double ay = V[n - 1, 1] + dy
    cdef double bx, by, d
    for i in range(n):
        bx = V[i, 0] + dx
        by = V[i, 1] + dy
        d = _dseg(px, py, ax, ay, bx, by)
        if d < best:
            best = d
        ax = bx
        ay = by
    return best


cdef bint _strictly_inside(double px, double py, double[:, ::1] V, double dx, double dy,
                           double eps) noexcept:
    return _dist_boundary(px, py, V, dx, dy) > eps and _pip(px, py, V, dx, dy)


cdef bint _edge_penetrates(double[:, ::1] A, double adx, double ady,
                           double[:, ::1] B, double bdx, double bdy,
                           double eps, double* ts) noexcept:
    # ts: scratch buffer with room for 2 + 2 * len(B) parameters
    cdef Py_ssize_t na = A.shape[0]
    cdef Py_ssize_t nb = B.shape[0]
    cdef Py_ssize_t i, j, m, q
    cdef double ax, ay, bx, by, cx, cy, ex, ey
    cdef double ux, uy, la, wx, wy, lw, denom, t1, t2, rx, ry, t, s
    cdef double prev, key, mx, my
    ax = A[na - 1, 0] + adx
    ay = A[na - 1, 1] + ady
    for i in range(na):
        bx = A[i, 0] + adx
        by = A[i, 1] + ady
        ux = bx - ax
        uy = by - ay
        la = sqrt(ux * ux + uy * uy)
        if la <= eps:
            ax = bx
            ay = by
            continue
        ux /= la
        uy /= la
        m = 0
        ts[m] = 0.0
        m += 1
        ts[m] = la
        m += 1
        cx = B[nb - 1, 0] + bdx
        cy = B[nb - 1, 1] + bdy
        for j in range(nb):
            ex = B[j, 0] + bdx
            ey = B[j, 1] + bdy
            wx = ex - cx
            wy = ey - cy
            lw = sqrt(wx * wx + wy * wy)
            denom = ux * wy - uy * wx
            if fabs(denom) <= lw * eps:
                # parallel; contributes only when collinear within eps
                if fabs(ux * (cy - ay) - uy * (cx - ax)) <= eps:
                    t1 = ux * (cx - ax) + uy * (cy - ay)
                    t2 = ux * (ex - ax) + uy * (ey - ay)
                    if t1 > t2:
                        t = t1
                        t1 = t2
                        t2 = t
                    if t2 >= -eps and t1 <= la + eps:
                        t1 = t1 if t1 > 0.0 else 0.0
                        t1 = t1 if t1 < la else la
                        t2 = t2 if t2 > 0.0 else 0.0
                        t2 = t2 if t2 < la else la
                        ts[m] = t1
                        m += 1
                        ts[m] = t2
                        m += 1
            else:
                rx = cx - ax
                ry = cy - ay
                t = (rx * wy - ry * wx) / denom
                s = (rx * uy - ry * ux) / denom
                if -eps <= t and t <= la + eps and -eps <= s * lw and s * lw <= lw + eps:
                    t = t if t > 0.0 else 0.0
                    t = t if t < la else la
                    ts[m] = t
                    m += 1
            cx = ex
            cy = ey
        # insertion sort (m is small)
        for j in range(1, m):
            key = ts[j]
            q = j - 1
            while q >= 0 and ts[q] > key:
                ts[q + 1] = ts[q]
                q -= 1
            ts[q + 1] = key
        prev = ts[0]
        for j in range(1, m):
            if ts[j] - prev > eps:
                mx = ax + ux * (prev + ts[j]) * 0.5
                my = ay + uy * (prev + ts[j]) * 0.5
                if _strictly_inside(mx, my, B, bdx, bdy, eps):
                    return True
            prev = ts[j]
        ax = bx
        ay = by
    return False


cdef bint _poly_pair_overlap(double[:, ::1] averts, double adx, double ady,
                             double aipx, double aipy,
                             double[:, ::1] bverts, double bdx, double bdy,
                             double bipx, double bipy, double eps) noexcept:
    cdef Py_ssize_t na = averts.shape[0]
    cdef Py_ssize_t nb = bverts.shape[0]
    cdef Py_ssize_t i, j
    cdef double axmin = _INF, aymin = _INF, axmax = -_INF, aymax = -_INF
    cdef double bxmin = _INF, bymin = _INF, bxmax = -_INF, bymax = -_INF
    cdef double x, y, lox, loy
    cdef double stack_buf[260]
    cdef double* ts
    cdef Py_ssize_t need
    cdef bint hit

    for i in range(na):
        x = averts[i, 0] + adx
        y = averts[i, 1] + ady
        if x < axmin:
            axmin = x
        if x > axmax:
            axmax = x
        if y < aymin:
            aymin = y
        if y > aymax:
            aymax = y
    for i in range(nb):
        x = bverts[i, 0] + bdx
        y = bverts[i, 1] + bdy
        if x < bxmin:
            bxmin = x
        if x > bxmax:
            bxmax = x
        if y < bymin:
            bymin = y
        if y > bymax:
            bymax = y
    lox = axmax if axmax < bxmax else bxmax
    loy = axmin if axmin > bxmin else bxmin
    if lox - loy < eps:
        return False
    lox = aymax if aymax < bymax else bymax
    loy = aymin if aymin > bymin else bymin
    if lox - loy < eps:
        return False

    for i in range(na):
        x = averts[i, 0] + adx
        y = averts[i, 1] + ady
        if _strictly_inside(x, y, bverts, bdx, bdy, eps):
            return True
    for i in range(nb):
        x = bverts[i, 0] + bdx
        y = bverts[i, 1] + bdy
        if _strictly_inside(x, y, averts, adx, ady, eps):
            return True

    need = 2 + 2 * (na if na > nb else nb)
    if need <= 260:
        ts = stack_buf
    else:
        ts = <double*> malloc(need * sizeof(double))
        if ts == NULL:
            # allocation failure: skip the edge tests, keep the vertex and
            # containment clauses
            ts = stack_buf
            need = 0
    hit = False
    if need != 0:
        hit = _edge_penetrates(averts, adx, ady, bverts, bdx, bdy, eps, ts)
        if not hit:
            hit = _edge_penetrates(bverts, bdx, bdy, averts, adx, ady, eps, ts)
    if ts != stack_buf:
        free(ts)
    if hit:
        return True

    if _strictly_inside(aipx + adx, aipy + ady, bverts, bdx, bdy, eps):
        return True
    if _strictly_inside(bipx + bdx, bipy + bdy, averts, adx, ady, eps):
        return True
    return False


def poly_pair_overlap(double[:, ::1] averts, double adx, double ady,
                      double aipx, double aipy,
                      double[:, ::1] bverts, double bdx, double bdy,
                      double bipx, double bipy, double eps):
    """True iff the open interiors of two simple polygons overlap by > eps."""
    return _poly_pair_overlap(averts, adx, ady, aipx, aipy,
                              bverts, bdx, bdy, bipx, bipy, eps)


cdef double _segment_overlap_len(double ax, double ay, double bx, double by,
                                 double cx, double cy, double dx, double dy,
                                 double eps) noexcept:
    cdef double ux = bx - ax
    cdef double uy = by - ay
    cdef double vx = dx - cx
    cdef double vy = dy - cy
    cdef double l1 = sqrt(ux * ux + uy * uy)
    cdef double l2 = sqrt(vx * vx + vy * vy)
    cdef double sin_dev, tc, td, tmp, hi, lo, out
    if l1 <= eps or l2 <= eps:
        return 0.0
    sin_dev = fabs(ux * vy - uy * vx) / (l1 * l2)
    if sin_dev > eps:
        return 0.0
    if fabs(ux * (cy - ay) - uy * (cx - ax)) / l1 > eps:
        return 0.0
    if fabs(ux * (dy - ay) - uy * (dx - ax)) / l1 > eps:
        return 0.0
    tc = (ux * (cx - ax) + uy * (cy - ay)) / l1
    td = (ux * (dx - ax) + uy * (dy - ay)) / l1
    if tc > td:
        tmp = tc
        tc = td
        td = tmp
    hi = td if td < l1 else l1
    lo = tc if tc > 0.0 else 0.0
    out = hi - lo
    return out if out > 0.0 else 0.0


def segment_overlap_len(double ax, double ay, double bx, double by,
                        double cx, double cy, double dx, double dy, double eps):
    """Length of the 1-D overlap of two collinear-within-eps segments."""
    return _segment_overlap_len(ax, ay, bx, by, cx, cy, dx, dy, eps)


def pair_overlap_score(double[:, ::1] segs_a, double sadx, double sady,
                       double[:, ::1] segs_b, double eps):
    """Sum over segment pairs of squared (overlap / longer length) ratios."""
    cdef Py_ssize_t na = segs_a.shape[0]
    cdef Py_ssize_t nb = segs_b.shape[0]
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef double ax, ay, bx, by, cx, cy, ex, ey
    cdef double dxa, dya, dxb, dyb, la, lb, ol, denom, r
    for i in range(na):
        ax = segs_a[i, 0] + sadx
        ay = segs_a[i, 1] + sady
        bx = segs_a[i, 2] + sadx
        by = segs_a[i, 3] + sady
        dxa = bx - ax
        dya = by - ay
        la = sqrt(dxa * dxa + dya * dya)
        for j in range(nb):
            cx = segs_b[j, 0]
            cy = segs_b[j, 1]
            ex = segs_b[j, 2]
            ey = segs_b[j, 3]
            ol = _segment_overlap_len(ax, ay, bx, by, cx, cy, ex, ey, eps)
            if ol > 0.0:
                dxb = ex - cx
                dyb = ey - cy
                lb = sqrt(dxb * dxb + dyb * dyb)
                denom = la if la > lb else lb
                r = ol / denom
                total += r * r
    return total


def count_distinct_points(double[:, ::1] pts, double eps):
    """Number of points distinct under eps coincidence (euclidean)."""
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j
    cdef long count = 0
    cdef double xi, yi, dx, dy
    cdef bint dup
    for i in range(n):
        xi = pts[i, 0]
        yi = pts[i, 1]
        dup = False
        for j in range(i):
            dx = xi - pts[j, 0]
            dy = yi - pts[j, 1]
            if sqrt(dx * dx + dy * dy) <= eps:
                dup = True
                break
        if not dup:
            count += 1
    return count


cdef bint _feasible(double[:, ::1] pverts, long long[::1] poff,
                    double[:, ::1] pbb, double[:, ::1] pips,
                    double dx, double dy,
                    double[:, ::1] overts, long long[::1] ooff,
                    double[:, ::1] obb, double[:, ::1] oips,
                    double W, double L, double eps) noexcept:
    cdef Py_ssize_t m = poff.shape[0] - 1
    cdef Py_ssize_t k = ooff.shape[0] - 1
    cdef Py_ssize_t p, kb
    cdef double xmn = _INF, ymn = _INF, xmx = -_INF, ymx = -_INF
    cdef double pxmn, pxmx, pymn, pymx, a, b
    for p in range(m):
        if pbb[p, 0] < xmn:
            xmn = pbb[p, 0]
        if pbb[p, 1] > xmx:
            xmx = pbb[p, 1]
        if pbb[p, 2] < ymn:
            ymn = pbb[p, 2]
        if pbb[p, 3] > ymx:
            ymx = pbb[p, 3]
    if xmn + dx < -eps or ymn + dy < -eps:
        return False
    if xmx + dx > W + eps or ymx + dy > L + eps:
        return False
    if k == 0:
        return True
    for p in range(m):
        pxmn = pbb[p, 0] + dx
        pxmx = pbb[p, 1] + dx
        pymn = pbb[p, 2] + dy
        pymx = pbb[p, 3] + dy
        for kb in range(k):
            a = pxmx if pxmx < obb[kb, 1] else obb[kb, 1]
            b = pxmn if pxmn > obb[kb, 0] else obb[kb, 0]
            if a - b < eps:
                continue
            a = pymx if pymx < obb[kb, 3] else obb[kb, 3]
            b = pymn if pymn > obb[kb, 2] else obb[kb, 2]
            if a - b < eps:
                continue
            if _poly_pair_overlap(
                pverts[poff[p]:poff[p + 1]], dx, dy, pips[p, 0], pips[p, 1],
                overts[ooff[kb]:ooff[kb + 1]], 0.0, 0.0, oips[kb, 0], oips[kb, 1],
                eps,
            ):
                return False
    return True


def feasible(double[:, ::1] pverts, long long[::1] poff,
             double[:, ::1] pbb, double[:, ::1] pips,
             double dx, double dy,
             double[:, ::1] overts, long long[::1] ooff,
             double[:, ::1] obb, double[:, ::1] oips,
             double W, double L, double eps):
    """Piece translated by (dx, dy) fits the bin and overlaps no obstacle."""
    return _feasible(pverts, poff, pbb, pips, dx, dy,
                     overts, ooff, obb, oips, W, L, eps)


def max_slide(double[:, ::1] pverts, long long[::1] poff,
              double[:, ::1] pbb, double[:, ::1] pips,
              double pdx, double pdy, double dirx, double diry,
              double[:, ::1] overts, long long[::1] ooff,
              double[:, ::1] obb, double[:, ::1] oips,
              double W, double L, double eps_abs, double eps_slide):
    """Largest feasible displacement along an axis direction; see _pure."""
    cdef Py_ssize_t m = poff.shape[0] - 1
    cdef Py_ssize_t k = ooff.shape[0] - 1
    cdef Py_ssize_t p, kb
    cdef double xmn = _INF, ymn = _INF, xmx = -_INF, ymx = -_INF
    cdef double ub, lo, hi, mid, window, tk
    cdef int it
    for p in range(m):
        if pbb[p, 0] < xmn:
            xmn = pbb[p, 0]
        if pbb[p, 1] > xmx:
            xmx = pbb[p, 1]
        if pbb[p, 2] < ymn:
            ymn = pbb[p, 2]
        if pbb[p, 3] > ymx:
            ymx = pbb[p, 3]
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
    if _feasible(pverts, poff, pbb, pips, pdx + dirx * ub, pdy + diry * ub,
                 overts, ooff, obb, oips, W, L, eps_abs):
        return ub

    lo = 0.0
    hi = ub
    it = 0
    while hi - lo > eps_slide * 0.25 and it < 64:
        mid = 0.5 * (lo + hi)
        if _feasible(pverts, poff, pbb, pips, pdx + dirx * mid, pdy + diry * mid,
                     overts, ooff, obb, oips, W, L, eps_abs):
            lo = mid
        else:
            hi = mid
        it += 1

    window = 4.0 * (eps_abs if eps_abs > eps_slide else eps_slide)
    cands = []
    if fabs(ub - lo) <= window:
        cands.append(ub)
    for kb in range(k):
        if dirx < -0.5:
            tk = xmn - obb[kb, 1]
        elif dirx > 0.5:
            tk = obb[kb, 0] - xmx
        elif diry < -0.5:
            tk = ymn - obb[kb, 3]
        else:
            tk = obb[kb, 2] - ymx
        if 0.0 <= tk <= ub and fabs(tk - lo) <= window:
            cands.append(tk)
    cands.sort(reverse=True)
    for tk in cands:
        if _feasible(pverts, poff, pbb, pips, pdx + dirx * tk, pdy + diry * tk,
                     overts, ooff, obb, oips, W, L, eps_abs):
            return tk
    return lo
