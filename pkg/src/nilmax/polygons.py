"""Exact rational predicates for convex polygons in the plane.

All inputs are pairs of numbers convertible to Fraction; every test is
decided with integer arithmetic only, so containment verdicts carry no
floating-point uncertainty.  Polygons are given by their vertices and
are assumed (and checked) to be convex; orientation is normalized to
counterclockwise internally.
"""

from __future__ import annotations

from fractions import Fraction


class PolygonError(ValueError):
    pass


def as_frac_point(p):
    return (Fraction(p[0]), Fraction(p[1]))


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area2(poly) -> Fraction:
    """Twice the signed area (positive for counterclockwise vertices)."""
    poly = [as_frac_point(p) for p in poly]
    acc = Fraction(0)
    for i in range(len(poly)):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % len(poly)]
        acc += x0 * y1 - x1 * y0
    return acc


def ensure_ccw(poly):
    """Vertices in counterclockwise order; rejects degenerate polygons."""
    poly = [as_frac_point(p) for p in poly]
    if len(poly) < 3:
        raise PolygonError("polygon needs at least 3 vertices")
    a2 = signed_area2(poly)
    if a2 == 0:
        raise PolygonError("degenerate (zero-area) polygon")
    if a2 < 0:
        poly = poly[::-1]
    for i in range(len(poly)):
        o, a = poly[i], poly[(i + 1) % len(poly)]
        b = poly[(i + 2) % len(poly)]
        if _cross(o, a, b) < 0:
            raise PolygonError("polygon is not convex")
    return poly


def point_in_convex(p, poly) -> bool:
    """Closed containment of a point in a convex polygon, decided exactly."""
    p = as_frac_point(p)
    poly = ensure_ccw(poly)
    for i in range(len(poly)):
        if _cross(poly[i], poly[(i + 1) % len(poly)], p) < 0:
            return False
    return True


def segment_in_convex(p0, p1, poly) -> bool:
    """Both endpoints inside; convexity carries the whole segment."""
    return point_in_convex(p0, poly) and point_in_convex(p1, poly)


def segment_interval_in_convex(p0, p1, poly):
    """The parameter interval {xi in [0,1]: p0 + xi (p1-p0) in poly}.

    Exact Cyrus-Beck clipping against the edge half-planes; returns
    (lo, hi) as Fractions, or None when the intersection is empty.
    """
    p0, p1 = as_frac_point(p0), as_frac_point(p1)
    poly = ensure_ccw(poly)
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    lo, hi = Fraction(0), Fraction(1)
    for i in range(len(poly)):
        a = poly[i]
        b = poly[(i + 1) % len(poly)]
        # inward normal of edge a->b is (-(b-a)_y, (b-a)_x) for CCW order
        nx, ny = a[1] - b[1], b[0] - a[0]
        num = nx * (p0[0] - a[0]) + ny * (p0[1] - a[1])   # >= 0 means inside
        den = nx * dx + ny * dy
        if den == 0:
            if num < 0:
                return None
            continue
        xi = -num / den
        if den > 0:
            lo = max(lo, xi)
        else:
            hi = min(hi, xi)
        if lo > hi:
            return None
    return (lo, hi)


def segment_in_union(p0, p1, polys) -> bool:
    """Exact test that the whole segment lies in a union of convex polygons.

    Collects the per-polygon parameter intervals and checks that they
    cover [0, 1] without gaps.
    """
    intervals = []
    for poly in polys:
        iv = segment_interval_in_convex(p0, p1, poly)
        if iv is not None:
            intervals.append(iv)
    intervals.sort()
    reach = Fraction(0)
    for lo, hi in intervals:
        if lo > reach:
            return False
        reach = max(reach, hi)
        if reach >= 1:
            return True
    return reach >= 1


def sqrt_bounds(x, rel_tol=Fraction(1, 10**12)):
    """Rational (lo, hi) with lo^2 <= x <= hi^2 and hi - lo small.

    Newton iteration from above on Fractions; x must be nonnegative.
    """
    x = Fraction(x)
    if x < 0:
        raise PolygonError("sqrt of a negative number")
    if x == 0:
        return (Fraction(0), Fraction(0))
    hi = max(x, Fraction(1))
    for _ in range(200):
        new = (hi + x / hi) / 2
        new = new.limit_denominator(10**18)
        if new * new < x:
            break
        if hi - new <= hi * rel_tol:
            hi = new
            break
        hi = new
    lo = x / hi            # lo * hi = x, so lo <= sqrt(x) <= hi
    if lo * lo > x or hi * hi < x:
        raise PolygonError("sqrt bracketing failed")
    return (lo, hi)
