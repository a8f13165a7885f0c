"""Seeing relation, charging options, corner polygons and option selection.

An option is a (direction index, anchor) pair; there are 4d of them.  Under
option (i, a), polygon P sees P' when P's edge e in direction v_i is
non-degenerate and the opposite anchor of P''s edge in direction -v_i lies
on interior(e) or on the a-anchor of e.  A polygon that sees someone is
accountable; a good option makes at least 3/(4d) of the non-corner polygons
accountable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import BoundViolated
from .geometry import on_segment, sub
from .instance import Instance
from .polygon import DirectionSystem, Polygon, polygon_from_vertices, tighten

TAIL = "t"
HEAD = "h"


@dataclass(frozen=True)
class Option:
    direction: int  # 1..2d
    anchor: str     # TAIL or HEAD

    def sort_key(self):
        return (self.direction, 0 if self.anchor == TAIL else 1)


def all_options(ds: DirectionSystem) -> list[Option]:
    return [Option(i, a) for i in range(1, 2 * ds.d + 1) for a in (TAIL, HEAD)]


def sees(p: Polygon, q: Polygon, opt: Option) -> bool:
    """Whether p sees q under opt: the opposite anchor of q's facing edge
    lies on the interior of p's edge or on its anchor endpoint."""
    ds = p.ds
    e = p.edge(opt.direction)
    if e.degenerate:
        return False
    e_opp = q.edge(ds.index_mod(opt.direction + ds.d))
    probe = e_opp.tail if opt.anchor == HEAD else e_opp.head  # opposite anchor
    mine = e.tail if opt.anchor == TAIL else e.head
    if probe == mine:
        return True
    if probe in (e.tail, e.head):
        return False
    return on_segment(probe, e.tail, e.head)


def seen_map(inst: Instance, opt: Option) -> dict[int, list[int]]:
    """pid -> sorted ids of polygons it sees under opt."""
    out: dict[int, list[int]] = {}
    for i, p in enumerate(inst.polygons):
        row = []
        for j, q in enumerate(inst.polygons):
            if i != j and sees(p, q, opt):
                row.append(j)
        out[i] = row
    return out


def check_injectivity(inst: Instance, opt: Option):
    """Every polygon is seen by at most one other polygon.  Returns (ok,
    collisions) where collisions lists (seen id, seer ids) diagnostics."""
    seers: dict[int, list[int]] = {}
    smap = seen_map(inst, opt)
    for i, row in smap.items():
        for j in row:
            seers.setdefault(j, []).append(i)
    collisions = [(j, tuple(sorted(v))) for j, v in sorted(seers.items())
                  if len(v) > 1]
    return (not collisions, collisions)


def corner_polygons(inst: Instance) -> set[int]:
    """Ids of polygons with all but at most one edge contained in the
    bounding-box boundary; degenerate edges count as contained."""
    out = set()
    bbox = inst.bbox
    d = inst.ds.d
    for pid, p in enumerate(inst.polygons):
        free = 0
        for i in range(1, 2 * d + 1):
            e = p.edge(i)
            if not _edge_on_boundary(e, bbox):
                free += 1
                if free > 1:
                    break
        if free <= 1:
            out.add(pid)
    return out


def _edge_on_boundary(e, bbox: Polygon) -> bool:
    d = bbox.ds.d
    for i in range(1, 2 * d + 1):
        b = bbox.edge(i)
        if b.degenerate:
            if e.degenerate and e.tail == b.tail:
                return True
            continue
        if on_segment(e.tail, b.tail, b.head) and on_segment(e.head, b.tail, b.head):
            return True
    return False


@dataclass
class ChargingReport:
    counts: dict[Option, int]
    accountable: dict[Option, list[int]]
    corner_ids: set[int]
    chosen: Option
    bound: int

    def table_rows(self):
        rows = []
        for opt in sorted(self.counts, key=lambda o: o.sort_key()):
            rows.append((opt, self.counts[opt], self.bound,
                         self.counts[opt] >= self.bound))
        return rows


def best_option(inst: Instance) -> ChargingReport:
    """Option maximizing the number of accountable non-corner polygons; the
    winner must reach ceil(3/(4d) * |non-corner|)."""
    ds = inst.ds
    z = corner_polygons(inst)
    rest = [i for i in range(inst.n) if i not in z]
    counts: dict[Option, int] = {}
    acc: dict[Option, list[int]] = {}
    for opt in all_options(ds):
        ids = []
        for i in rest:
            if any(sees(inst.polygons[i], inst.polygons[j], opt)
                   for j in range(inst.n) if j != i):
                ids.append(i)
        counts[opt] = len(ids)
        acc[opt] = ids
    bound = math.ceil(Fraction(3, 4 * ds.d) * len(rest))
    # Deterministic: maximum count, then smallest (direction, anchor).
    best_count = max(counts.values())
    chosen = min((o for o in counts if counts[o] == best_count),
                 key=lambda o: o.sort_key())
    if counts[chosen] < bound:
        raise BoundViolated(
            f"best option reaches {counts[chosen]} < required {bound}")
    return ChargingReport(counts=counts, accountable=acc, corner_ids=z,
                          chosen=chosen, bound=bound)


# ---------------------------------------------------------------------------
# Normalization: map any option onto (vertical-up, tail).


def _primitive(v):
    g = gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g)


def _unimodular_to_up(v):
    """Integer matrix with determinant 1 sending direction v to a positive
    multiple of (0, 1)."""
    a, b = _primitive(v)
    # rows (m11 m12; m21 m22): m11*a + m12*b = 0, m21*a + m22*b = 1
    # Extended gcd on (a, b); gcd is 1 after making v primitive.
    x0, x1, y0, y1 = 1, 0, 0, 1
    p, q = a, b
    while q:
        k, p, q = p // q, q, p % q
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    # p == gcd == +-1; x0*a + y0*b == p
    if p < 0:
        x0, y0 = -x0, -y0
    return ((b, -a), (x0, y0))


def _apply(m, p):
    return (m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1])


@dataclass(frozen=True)
class NormalizeMap:
    matrix: tuple    # 2x2 integer
    inverse: tuple   # 2x2 rational

    def fwd(self, p):
        return (Fraction(self.matrix[0][0] * p[0] + self.matrix[0][1] * p[1]),
                Fraction(self.matrix[1][0] * p[0] + self.matrix[1][1] * p[1]))

    def back(self, p):
        m = self.inverse
        return (m[0][0] * p[0] + m[0][1] * p[1],
                m[1][0] * p[0] + m[1][1] * p[1])


def _invert(m):
    det = Fraction(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    return ((m[1][1] / det, -m[0][1] / det), (-m[1][0] / det, m[0][0] / det))


def normalization_map(ds: DirectionSystem, opt: Option) -> NormalizeMap:
    v = ds.vec(opt.direction)
    base = _unimodular_to_up(v)
    if opt.anchor == TAIL:
        m = base
    else:
        # Orientation-reversing: send v to (0, -1) by flipping y after the
        # rotation; the reversed boundary orientation then points the image
        # edge upward again while swapping heads and tails.
        m = (base[0], (-base[1][0], -base[1][1]))
    return NormalizeMap(matrix=m, inverse=_invert(m))


def normalized_direction_system(ds: DirectionSystem, nm: NormalizeMap) -> DirectionSystem:
    """Valid direction system spanned by the image direction set: primitive
    representatives pointing up or left, sorted counter-clockwise."""
    reps = []
    for i in range(1, ds.d + 1):
        w = _primitive(_apply(nm.matrix, ds.vec(i)))
        if w[0] > 0 or (w[0] == 0 and w[1] < 0):
            w = (-w[0], -w[1])
        reps.append(w)

    def slope_key(v):
        if v[0] == 0:
            return (0, Fraction(0))
        return (1, Fraction(v[1], v[0]))

    reps.sort(key=slope_key)
    return DirectionSystem.make(reps)


def _with_level1(p: Polygon) -> Polygon:
    d2 = 2 * p.ds.d
    return Polygon(ds=p.ds, supports=p.supports, vertices=p.vertices,
                   _edges=p._edges,
                   line_levels=tuple(1 if not p.edge(i).degenerate else None
                                     for i in range(1, d2 + 1)))


def transform_instance(inst: Instance, nm: NormalizeMap):
    """Apply an exact linear map to a whole instance, re-deriving the
    direction system and re-encoding every polygon from mapped vertices."""
    new_ds = normalized_direction_system(inst.ds, nm)
    polys = [_with_level1(polygon_from_vertices(new_ds,
                                                [nm.fwd(v) for v in p.vertices]))
             for p in inst.polygons]
    bbox = _with_level1(polygon_from_vertices(new_ds,
                                              [nm.fwd(v) for v in inst.bbox.vertices]))
    return Instance(ds=new_ds, polygons=tuple(polys), bbox=bbox), nm


def normalize_to_v1t(inst: Instance, opt: Option):
    """Transform the instance so the given option becomes (vertical-up,
    tail).  Returns (instance, map); polygons keep their ids, seeing under
    (v_1, t) in the image equals seeing under opt in the original."""
    return transform_instance(inst, normalization_map(inst.ds, opt))
