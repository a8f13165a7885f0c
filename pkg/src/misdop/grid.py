"""Lazy grid hierarchy: level-1 lines through input vertices, recursively
derived intersection points and lines.

The full grid is never materialized (its size is doubly exponential in d);
membership is decided by provenance: every derived line records the point it
was spanned from, every derived point the two lines that created it.
level-k lines pass through level-(k-1) points; input-polygon vertices and
bounding-box corners sit at level 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import MissingProvenance
from .geometry import Point, cross, dot
from .polygon import DirectionSystem, Polygon


def canonical_line(direction, point: Point):
    """Canonical key (a, b, c) with primitive integer (a, b), representing
    the line {(x, y) : a*x + b*y = c} through `point`."""
    a, b = int(direction[1]), int(-direction[0])  # normal of the direction
    g = gcd(abs(a), abs(b))
    a, b = a // g, b // g
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    c = a * point[0] + b * point[1]
    return (a, b, Fraction(c))


@dataclass(frozen=True)
class GridLine:
    key: tuple  # canonical (a, b, c)
    level: int
    anchor: "GridPoint | None"  # None for level-1 lines (input/bbox anchored)

    def contains(self, p: Point) -> bool:
        a, b, c = self.key
        return a * p[0] + b * p[1] == c


@dataclass(frozen=True)
class GridPoint:
    point: Point
    line1: GridLine
    line2: GridLine

    @property
    def level(self) -> int:
        return max(self.line1.level, self.line2.level)


def line_through(direction, anchor: GridPoint) -> GridLine:
    """Derived line in `direction` through a previously derived point."""
    return GridLine(key=canonical_line(direction, anchor.point),
                    level=anchor.level + 1, anchor=anchor)


def level1_lines(inst) -> list[GridLine]:
    """All d directions through every distinct polygon vertex, plus the
    bounding-box edge lines, deduplicated.  Size is at most 2*d*d*n + 4."""
    ds: DirectionSystem = inst.ds
    seen: dict[tuple, GridLine] = {}
    for poly in inst.polygons:
        for v in poly.vertices:
            for i in range(1, ds.d + 1):
                key = canonical_line(ds.vec(i), v)
                if key not in seen:
                    seen[key] = GridLine(key=key, level=1, anchor=None)
    for i in range(1, 2 * ds.d + 1):
        e = inst.bbox.edge(i)
        if not e.degenerate:
            key = canonical_line(ds.vec(i), e.tail)
            if key not in seen:
                seen[key] = GridLine(key=key, level=1, anchor=None)
    return sorted(seen.values(), key=lambda g: g.key)


def certify_line(line: GridLine | None, k: int) -> bool:
    if line is None:
        raise MissingProvenance("object carries no grid derivation metadata")
    return line.level <= k


def certify_point(gp: GridPoint | None, k: int) -> bool:
    if gp is None:
        raise MissingProvenance("object carries no grid derivation metadata")
    return gp.level <= k


def certify_polygon(poly: Polygon, k: int) -> bool:
    """A polygon lies on grid level k when every non-degenerate edge sits on
    a level <= k line (vertices are then intersections of such lines)."""
    if poly.line_levels is None:
        raise MissingProvenance("polygon was built without line levels")
    d = poly.ds.d
    for i in range(1, 2 * d + 1):
        if poly.edge(i).degenerate:
            continue
        lvl = poly.line_levels[i - 1]
        if lvl is None:
            raise MissingProvenance(f"edge {i} carries no line level")
        if lvl > k:
            return False
    return True


def certify_on_grid(obj, k: int) -> bool:
    """Dispatching front door: GridPoint, GridLine or provenance-carrying
    Polygon."""
    if isinstance(obj, GridPoint):
        return certify_point(obj, k)
    if isinstance(obj, GridLine):
        return certify_line(obj, k)
    if isinstance(obj, Polygon):
        return certify_polygon(obj, k)
    raise MissingProvenance(f"cannot certify object of type {type(obj).__name__}")


def enumerate_points_at_level(ds: DirectionSystem, lines: list[GridLine],
                              levels: int) -> set[Point]:
    """Materialize V_k for tiny test instances: intersect all current lines,
    span new lines through the points, repeat.  Only feasible for micro
    inputs; the general grid is astronomically large by design."""
    dirs = [ds.vec(i) for i in range(1, ds.d + 1)]
    pts: set[Point] = set()
    cur = {g.key for g in lines}
    for _ in range(levels):
        keys = sorted(cur)
        new_pts: set[Point] = set()
        for i in range(len(keys)):
            a1, b1, c1 = keys[i]
            for j in range(i + 1, len(keys)):
                a2, b2, c2 = keys[j]
                den = a1 * b2 - a2 * b1
                if den == 0:
                    continue
                x = (c1 * b2 - c2 * b1) / den
                y = (a1 * c2 - a2 * c1) / den
                new_pts.add((x, y))
        pts |= new_pts
        for p in new_pts:
            for dvec in dirs:
                cur.add(canonical_line(dvec, p))
    return pts
