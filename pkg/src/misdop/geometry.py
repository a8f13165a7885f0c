"""Exact planar primitives over rational coordinates.

Points are pairs of fractions, chains are vertex tuples.  Every predicate
here is decided with exact arithmetic; nothing is ever rounded.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

Point = tuple[Fraction, Fraction]
Vec = tuple[Fraction, Fraction]


def pt(x, y) -> Point:
    return (Fraction(x), Fraction(y))


def sub(a: Point, b: Point) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Point, b: Vec) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def scale(v: Vec, s) -> Vec:
    return (v[0] * s, v[1] * s)


def cross(u: Vec, v: Vec) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def perp(v) -> Vec:
    """Clockwise rotation (x, y) -> (y, -x)."""
    return (Fraction(v[1]), Fraction(-v[0]))


def orient(a: Point, b: Point, c: Point) -> Fraction:
    """Twice the signed area of triangle abc (> 0 when counter-clockwise)."""
    return cross(sub(b, a), sub(c, a))


class Segment(NamedTuple):
    tail: Point
    head: Point

    @property
    def degenerate(self) -> bool:
        return self.tail == self.head

    def reversed(self) -> "Segment":
        return Segment(self.head, self.tail)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """Whether p lies on the closed segment ab (collinear and between)."""
    if orient(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def line_intersection(a: Point, b: Point, c: Point, d: Point) -> Point | None:
    """Intersection point of lines ab and cd, or None if parallel."""
    r = sub(b, a)
    s = sub(d, c)
    den = cross(r, s)
    if den == 0:
        return None
    t = cross(sub(c, a), s) / den
    return add(a, scale(r, t))


def segment_intersection(a: Point, b: Point, c: Point, d: Point):
    """Intersection of closed segments ab and cd.

    Returns None, a Point, or a Segment (collinear overlap of positive
    length).  Degenerate inputs are handled.
    """
    if a == b:
        return a if on_segment(a, c, d) else None
    if c == d:
        return c if on_segment(c, a, b) else None
    r = sub(b, a)
    s = sub(d, c)
    den = cross(r, s)
    if den == 0:
        if orient(a, b, c) != 0:
            return None
        # Collinear: overlap interval along ab.
        def key(p):
            return dot(sub(p, a), r)
        lo, hi = sorted([key(c), key(d)])
        lo = max(lo, 0)
        hi = min(hi, dot(r, r))
        if lo > hi:
            return None
        p = add(a, scale(r, lo / dot(r, r)))
        q = add(a, scale(r, hi / dot(r, r)))
        return p if p == q else Segment(p, q)
    t = cross(sub(c, a), s) / den
    u = cross(sub(c, a), r) / den
    if 0 <= t <= 1 and 0 <= u <= 1:
        return add(a, scale(r, t))
    return None


def intersection_points(x) -> list[Point]:
    """Endpoints of a segment_intersection result (None, Point or Segment)."""
    if x is None:
        return []
    if isinstance(x, Segment):
        return [x.tail, x.head]
    return [x]


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Monotone-chain hull, counter-clockwise, no collinear interior points."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# Chains.  A chain is a tuple of vertices; consecutive vertices are the
# segments.  A single point is a degenerate chain.


def chain_segments(points) -> list[Segment]:
    return [Segment(points[i], points[i + 1]) for i in range(len(points) - 1)]


def dedup_consecutive(points) -> tuple[Point, ...]:
    out = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    return tuple(out)


def _is_spur(a: Point, b: Point, c: Point) -> bool:
    # Edges ab and bc overlap: collinear and folding back.
    return orient(a, b, c) == 0 and dot(sub(b, a), sub(c, b)) < 0


def remove_spurs(points, closed: bool = False) -> tuple[Point, ...]:
    """Delete vertices whose two incident edges overlap (backtracking).

    Repeats until no spur remains.  For a closed chain the wrap-around pairs
    are treated like any other; enclosed area is unchanged.
    """
    if closed:
        pts = list(dedup_consecutive(points))
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts.pop()
        changed = True
        while changed and len(pts) > 2:
            changed = False
            n = len(pts)
            for i in range(n):
                a, b, c = pts[(i - 1) % n], pts[i], pts[(i + 1) % n]
                if b == a or c == a or _is_spur(a, b, c):
                    del pts[i]
                    changed = True
                    break
        return tuple(pts)

    out: list[Point] = []
    for p in dedup_consecutive(points):
        if out and out[-1] == p:
            continue
        out.append(p)
        while len(out) >= 3:
            a, b, c = out[-3], out[-2], out[-1]
            if c == a:
                out.pop()
                out.pop()
            elif _is_spur(a, b, c):
                out.pop()
                out.pop()
                out.append(c)
            else:
                break
    return tuple(out)


def _refine_chains(a, b):
    """Split the segments of both chains at every vertex and every pairwise
    intersection point, so that shared geometry becomes vertex-aligned."""
    events = set(a) | set(b)
    segs_a = chain_segments(a)
    segs_b = chain_segments(b)
    for s in segs_a:
        for t in segs_b:
            x = segment_intersection(s.tail, s.head, t.tail, t.head)
            if x is None:
                continue
            if isinstance(x, Segment):
                events.add(x.tail)
                events.add(x.head)
            else:
                events.add(x)

    def refine(points):
        out = [points[0]]
        for s in chain_segments(points):
            if s.degenerate:
                continue
            onseg = [p for p in events
                     if p != s.tail and p != s.head and on_segment(p, s.tail, s.head)]
            d = sub(s.head, s.tail)
            onseg.sort(key=lambda p: dot(sub(p, s.tail), d))
            out.extend(onseg)
            out.append(s.head)
        return dedup_consecutive(out)

    return refine(a), refine(b)


def _dir_key(base: Vec, u: Vec):
    """Sort key for direction u in the counter-clockwise sweep from base.

    Key 0: same direction as base; 1: within the open half-turn after base;
    2: opposite; 3: remaining half-turn.  Within 1 and 3 the cross product
    orders directions, exposed through pairwise comparison only.
    """
    c = cross(base, u)
    d = dot(base, u)
    if c == 0:
        return 0 if d > 0 else 2
    return 1 if c > 0 else 3


def _ccw_before(base: Vec, u: Vec, w: Vec) -> bool:
    """Whether u appears strictly before w sweeping CCW starting after base."""
    ku, kw = _dir_key(base, u), _dir_key(base, w)
    if ku != kw:
        return ku < kw
    return cross(u, w) > 0


def _side_of_path(d_in: Vec, d_out: Vec, u: Vec) -> int:
    """Side of branch u relative to a path arriving with d_in, leaving with
    d_out: +1 left, -1 right.  u must not point along the path."""
    back = (-d_in[0], -d_in[1])
    if cross(d_out, u) == 0 and dot(d_out, u) > 0:
        raise ValueError("branch direction lies along the path")
    if cross(back, u) == 0 and dot(back, u) > 0:
        raise ValueError("branch direction lies along the path")
    return 1 if _ccw_before(d_out, u, back) else -1


def _common_runs(a, b):
    """Maximal runs of shared consecutive vertices between two chains."""
    pos_b: dict[Point, list[int]] = {}
    for j, p in enumerate(b):
        pos_b.setdefault(p, []).append(j)
    runs = []
    for i, p in enumerate(a):
        for j in pos_b.get(p, ()):
            if i > 0 and j > 0 and a[i - 1] == b[j - 1]:
                continue  # not the start of a maximal run
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            runs.append((i, j, k))  # shared vertices a[i..i+k-1]
    return runs


def _run_crosses(a, b, i, j, k) -> bool:
    """Decide whether the shared run a[i..i+k-1] == b[j..j+k-1] is a crossing."""
    # Need branches on both sides in both chains.
    if i == 0 or j == 0 or i + k == len(a) or j + k == len(b):
        return False
    ent = i
    ext = i + k - 1
    if k == 1:
        d_in = sub(a[ent], a[ent - 1])
        d_out = sub(a[ext + 1], a[ext])
    else:
        d_in = sub(a[ent], a[ent - 1])
        d_out = sub(a[ent + 1], a[ent])
    try:
        s_in = _side_of_path(d_in, d_out, sub(b[j - 1], a[ent]))
    except ValueError:
        return False
    if k == 1:
        d_in2, d_out2 = d_in, d_out
    else:
        d_in2 = sub(a[ext], a[ext - 1])
        d_out2 = sub(a[ext + 1], a[ext])
    try:
        s_out = _side_of_path(d_in2, d_out2, sub(b[j + k], a[ext]))
    except ValueError:
        return False
    return s_in != s_out


def crossing_detect(a, b) -> bool:
    """Whether two polygonal chains cross (not merely touch).

    Both chains are vertex-aligned first, then every maximal shared run is
    classified by whether the second chain enters and leaves on opposite
    sides of the first.  Touching runs and endpoint contacts return False.
    Inputs are expected to be spur-free.
    """
    a = dedup_consecutive(a)
    b = dedup_consecutive(b)
    if len(a) < 2 or len(b) < 2:
        return False
    ra, rb = _refine_chains(a, b)
    for bb in (rb, tuple(reversed(rb))):
        for i, j, k in _common_runs(ra, bb):
            if _run_crosses(ra, bb, i, j, k):
                return True
    return False


def chain_crosses_itself(points) -> bool:
    """Whether a single chain contains a self-crossing (shared sub-runs of
    distinct parameter intervals that cross)."""
    pts = dedup_consecutive(points)
    n = len(pts)
    for cut in range(1, n - 1):
        if crossing_detect(pts[:cut + 1], pts[cut:]):
            return True
    return False
