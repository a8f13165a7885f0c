"""Point location and measure for weakly simple closed boundaries.

Container boundaries may touch themselves but never cross, so the winding
number of any off-boundary point is 0 or 1 and the shoelace sum equals the
enclosed area.  All queries are exact.
"""

from __future__ import annotations

from fractions import Fraction

from .geometry import (Point, cross, intersection_points, on_segment,
                       segment_intersection, sub)

INSIDE = "inside"
ON = "on"
OUTSIDE = "outside"


def loop_area(loop) -> Fraction:
    """Shoelace area of a closed vertex loop (last vertex need not repeat
    the first)."""
    s = Fraction(0)
    n = len(loop)
    for i in range(n):
        s += cross(loop[i], loop[(i + 1) % n])
    return s / 2


def point_on_loop(loop, p: Point) -> bool:
    n = len(loop)
    for i in range(n):
        a, b = loop[i], loop[(i + 1) % n]
        if a == b:
            if p == a:
                return True
        elif on_segment(p, a, b):
            return True
    return False


def winding_number(loop, p: Point) -> int:
    """Winding number of the loop around p; p must be off the boundary."""
    w = 0
    n = len(loop)
    for i in range(n):
        a, b = loop[i], loop[(i + 1) % n]
        if a[1] <= p[1]:
            if b[1] > p[1] and cross(sub(b, a), sub(p, a)) > 0:
                w += 1
        elif b[1] <= p[1] and cross(sub(b, a), sub(p, a)) < 0:
            w -= 1
    return w


def classify_point(loop, p: Point) -> str:
    if point_on_loop(loop, p):
        return ON
    return INSIDE if winding_number(loop, p) != 0 else OUTSIDE


def segment_in_closure(loop, a: Point, b: Point) -> bool:
    """Whether the closed segment ab stays within the closed region: split
    at every boundary intersection, then classify piece midpoints."""
    if a == b:
        return classify_point(loop, a) != OUTSIDE
    cuts = {Fraction(0), Fraction(1)}
    d = sub(b, a)
    den = d[0] * d[0] + d[1] * d[1]
    n = len(loop)
    for i in range(n):
        u, v = loop[i], loop[(i + 1) % n]
        for q in intersection_points(segment_intersection(a, b, u, v)):
            t = (sub(q, a)[0] * d[0] + sub(q, a)[1] * d[1])
            cuts.add(t / den)
    ts = sorted(cuts)
    for t0, t1 in zip(ts, ts[1:]):
        tm = (t0 + t1) / 2
        mid = (a[0] + d[0] * tm, a[1] + d[1] * tm)
        if classify_point(loop, mid) == OUTSIDE:
            return False
    return True


def chain_in_closure(loop, chain) -> bool:
    return all(segment_in_closure(loop, chain[i], chain[i + 1])
               for i in range(len(chain) - 1))


def segment_meets_interior(loop, a: Point, b: Point) -> bool:
    """Whether the closed segment ab meets the open region."""
    if a == b:
        return classify_point(loop, a) == INSIDE
    cuts = {Fraction(0), Fraction(1)}
    d = sub(b, a)
    den = d[0] * d[0] + d[1] * d[1]
    n = len(loop)
    for i in range(n):
        u, v = loop[i], loop[(i + 1) % n]
        for q in intersection_points(segment_intersection(a, b, u, v)):
            t = (sub(q, a)[0] * d[0] + sub(q, a)[1] * d[1])
            cuts.add(t / den)
    ts = sorted(cuts)
    for t0, t1 in zip(ts, ts[1:]):
        tm = (t0 + t1) / 2
        mid = (a[0] + d[0] * tm, a[1] + d[1] * tm)
        if classify_point(loop, mid) == INSIDE:
            return True
    return False


def polygon_interior_hits_segment(poly, a: Point, b: Point) -> bool:
    """Whether segment ab meets the open interior of a convex polygon."""
    ds = poly.ds
    # Clip ab against the half-planes; remaining open interval nonempty?
    lo, hi = Fraction(0), Fraction(1)
    d = sub(b, a)
    for i in range(1, 2 * ds.d + 1):
        w = ds.normal(i)
        num = poly.support(i) - (a[0] * w[0] + a[1] * w[1])
        den = d[0] * w[0] + d[1] * w[1]
        if den == 0:
            if num <= 0:
                return False
            continue
        t = num / den
        if den > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
        if lo >= hi:
            return False
    return lo < hi
