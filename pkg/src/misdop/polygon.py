"""Convex polygons with edges in d fixed directions, encoded by support values.

A polygon is the open set {x : x . perp(v_i) < p_i for all i in [2d]} with
every constraint tight on the closure.  Index arithmetic on directions is
modulo 2d throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DirectionMismatch, EmptyInterior, InvalidDirections, Unbounded
from .geometry import (Point, Segment, convex_hull, cross, dedup_consecutive,
                       dot, line_intersection, orient, perp, sub)

IVec = tuple[int, int]


@dataclass(frozen=True)
class DirectionSystem:
    """The d primary direction vectors plus their negations v_{d+1}..v_{2d}.

    v_1 = (0, 1); v_2..v_d point left (negative x) in counter-clockwise
    order, i.e. slope y/x strictly increasing, so that the edge chain
    e_1 e_2 ... e_{2d} of every polygon is positively oriented.
    """

    d: int
    vectors: tuple[IVec, ...]  # length 2d

    @classmethod
    def make(cls, primaries) -> "DirectionSystem":
        vs = [(int(x), int(y)) for x, y in primaries]
        d = len(vs)
        if d < 2:
            raise InvalidDirections("need at least 2 directions")
        if vs[0] != (0, 1):
            raise InvalidDirections("first direction must be (0, 1)")
        for v in vs[1:]:
            if v[0] >= 0:
                raise InvalidDirections(f"direction {v} must point to the left")
        for a, b in zip(vs, vs[1:]):
            if a[0] * b[1] - a[1] * b[0] <= 0:
                raise InvalidDirections(
                    f"directions {a}, {b} out of counter-clockwise order")
        full = vs + [(-x, -y) for x, y in vs]
        return cls(d=d, vectors=tuple(full))

    def vec(self, i: int) -> IVec:
        return self.vectors[(i - 1) % (2 * self.d)]

    def normal(self, i: int):
        """Outward normal of the edge in direction v_i (clockwise rotation)."""
        return perp(self.vec(i))

    def index_mod(self, i: int) -> int:
        return (i - 1) % (2 * self.d) + 1

    def opposite(self, i: int) -> int:
        return self.index_mod(i + self.d)


def _angle_cmp(u, w) -> int:
    """Counter-clockwise angular order starting at direction (1, 0)."""
    hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
    hw = 0 if (w[1] > 0 or (w[1] == 0 and w[0] > 0)) else 1
    if hu != hw:
        return -1 if hu < hw else 1
    c = cross(u, w)
    return 0 if c == 0 else (-1 if c > 0 else 1)


def _bounded(normals) -> bool:
    """Whether the outward normals positively span the plane (every angular
    gap strictly below a half turn)."""
    import functools

    uniq = set(normals)
    if len(uniq) < 3:
        return False
    order = sorted(uniq, key=functools.cmp_to_key(_angle_cmp))
    n = len(order)
    return all(cross(order[k], order[(k + 1) % n]) > 0 for k in range(n))


@dataclass(frozen=True)
class Polygon:
    """A tightened d-DOP: all 2d support values exact on the closure."""

    ds: DirectionSystem
    supports: tuple[Fraction, ...]
    vertices: tuple[Point, ...]  # CCW, distinct
    _edges: tuple[tuple[Point, Point], ...] = field(repr=False, default=())
    line_levels: tuple[int, ...] | None = field(default=None, compare=False)

    def edge(self, i: int) -> Segment:
        """Edge in direction v_i, oriented along v_i; degenerate edges are a
        repeated vertex."""
        t, h = self._edges[(i - 1) % (2 * self.ds.d)]
        return Segment(t, h)

    def support(self, i: int) -> Fraction:
        return self.supports[(i - 1) % (2 * self.ds.d)]

    def degenerate_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, 2 * self.ds.d + 1)
                     if self.edge(i).degenerate)

    def interior_point(self) -> Point:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        n = len(self.vertices)
        return (sum(xs) / n, sum(ys) / n)

    def area(self) -> Fraction:
        v = self.vertices
        s = Fraction(0)
        for i in range(len(v)):
            s += cross(v[i], v[(i + 1) % len(v)])
        return s / 2

    def contains_point(self, p: Point, strict: bool = True) -> bool:
        for i in range(1, 2 * self.ds.d + 1):
            val = dot(p, self.ds.normal(i))
            if strict and val >= self.support(i):
                return False
            if not strict and val > self.support(i):
                return False
        return True

    def boundary_loop(self) -> tuple[Point, ...]:
        return self.vertices


def tighten(ds: DirectionSystem, raw: dict[int, Fraction],
            line_levels: dict[int, int] | None = None) -> Polygon:
    """Build the tightened polygon of the finite constraints in `raw`
    (index -> support).  Raises Unbounded / EmptyInterior."""
    idx = sorted(raw)
    if not _bounded([ds.normal(i) for i in idx]):
        raise Unbounded("constraint normals do not bound a region")

    lines = {i: (ds.normal(i), raw[i]) for i in idx}
    candidates: set[Point] = set()
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            i, j = idx[a], idx[b]
            wi, pi = lines[i]
            wj, pj = lines[j]
            den = cross(wi, wj)
            if den == 0:
                continue
            x = (pi * wj[1] - pj * wi[1]) / den
            y = (wi[0] * pj - wj[0] * pi) / den
            p = (x, y)
            if all(dot(p, lines[k][0]) <= lines[k][1] for k in idx):
                candidates.add(p)
    hull = convex_hull(candidates)
    if len(hull) < 3:
        raise EmptyInterior("constraint system has no interior")

    supports = []
    for i in range(1, 2 * ds.d + 1):
        w = ds.normal(i)
        supports.append(max(dot(v, w) for v in hull))

    edges = []
    for i in range(1, 2 * ds.d + 1):
        w = ds.normal(i)
        p = supports[i - 1]
        on_line = [v for v in hull if dot(v, w) == p]
        v = ds.vec(i)
        on_line.sort(key=lambda q: dot(q, v))
        edges.append((on_line[0], on_line[-1]))

    levels = None
    if line_levels is not None:
        levels = tuple(line_levels.get(i) for i in range(1, 2 * ds.d + 1))
    return Polygon(ds=ds, supports=tuple(supports), vertices=tuple(hull),
                   _edges=tuple(edges), line_levels=levels)


def make_polygon(ds: DirectionSystem, supports,
                 line_levels: dict[int, int] | None = None) -> Polygon:
    """Tighten a full vector of 2d support values into a Polygon."""
    vals = [Fraction(p) for p in supports]
    if len(vals) != 2 * ds.d:
        raise ValueError(f"expected {2 * ds.d} support values")
    raw = {i + 1: vals[i] for i in range(2 * ds.d)}
    return tighten(ds, raw, line_levels)


def polygon_from_vertices(ds: DirectionSystem, vertices) -> Polygon:
    """Encode the convex hull of `vertices`; every vertex must be extreme in
    some direction pair of the system (edges parallel to the system)."""
    supports = [max(dot(v, ds.normal(i)) for v in vertices)
                for i in range(1, 2 * ds.d + 1)]
    return make_polygon(ds, supports)


def _check_same(ds_a: DirectionSystem, ds_b: DirectionSystem):
    if ds_a.vectors != ds_b.vectors:
        raise DirectionMismatch("polygons use different direction systems")


def intersects(p: Polygon, q: Polygon) -> bool:
    """Whether the interiors intersect: the support criterion
    p_i(P) > -p_{i+d}(Q) must hold for every i."""
    _check_same(p.ds, q.ds)
    d = p.ds.d
    for i in range(1, 2 * d + 1):
        if p.support(i) <= -q.support(i + d):
            return False
    return True


def touches(p: Polygon, q: Polygon) -> bool:
    """Interiors disjoint but closures in contact."""
    _check_same(p.ds, q.ds)
    if intersects(p, q):
        return False
    d = p.ds.d
    for i in range(1, 2 * d + 1):
        if p.support(i) < -q.support(i + d):
            return False
    return True


def contains_polygon(outer: Polygon, inner: Polygon, strict: bool = False) -> bool:
    """Closure containment via support dominance; strict requires the inner
    closure inside the outer interior."""
    _check_same(outer.ds, inner.ds)
    for i in range(1, 2 * outer.ds.d + 1):
        if strict:
            if inner.support(i) >= outer.support(i):
                return False
        elif inner.support(i) > outer.support(i):
            return False
    return True


def top_chain(p: Polygon) -> tuple[Point, ...]:
    """Upper boundary e_2 .. e_d, right to left; degenerate edges skipped."""
    d = p.ds.d
    pts = [p.edge(2).tail]
    for i in range(2, d + 1):
        pts.append(p.edge(i).head)
    return dedup_consecutive(pts)


def bot_chain(p: Polygon) -> tuple[Point, ...]:
    """Lower boundary e_{d+2} .. e_{2d}, left to right."""
    d = p.ds.d
    pts = [p.edge(d + 2).tail]
    for i in range(d + 2, 2 * d + 1):
        pts.append(p.edge(i).head)
    return dedup_consecutive(pts)
