"""Maximal extension of an independent polygon set.

Each direction index is processed once per polygon; the polygon's support in
that direction grows continuously until an event fires:

  CORNER_CONTACT  a sliding corner reaches another polygon's edge line while
                  the growing edge itself is still clear; the touched line is
                  adopted as a new tight constraint and growth continues.
  EDGE_CONTACT    the interior of the growing edge reaches another polygon's
                  boundary or the bounding box; growth in this direction stops.
  EDGE_COLLAPSE   the growing edge shrinks to a point; the constraint is
                  dropped (sentinel, not a large number) and growth stops.

Afterwards every non-degenerate edge interior touches a neighbour or the
box, originals are contained in their extensions, independence is kept, and
all geometry stays on the derivation grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import MisdopError, NotIndependent
from .geometry import dot, sub
from .instance import Instance, conflict_graph
from .polygon import Polygon, tighten

BBOX_WITNESS = "BBOX"


class EventKind(enum.Enum):
    CORNER_CONTACT = "corner-contact"
    EDGE_CONTACT = "edge-contact"
    EDGE_COLLAPSE = "edge-collapse"


@dataclass
class _PolyState:
    supports: dict[int, Fraction]      # finite constraints only
    absent: set[int]                   # indices with the +infinity sentinel
    levels: dict[int, int]             # grid line level per finite constraint
    poly: Polygon | None = None        # cached tightened form

    def tightened(self, ds) -> Polygon:
        if self.poly is None:
            self.poly = tighten(ds, dict(self.supports),
                                line_levels=dict(self.levels))
        return self.poly

    def invalidate(self):
        self.poly = None


@dataclass(frozen=True)
class Event:
    pid: int
    direction: int
    delta: Fraction
    kind: EventKind
    witness: int | str | None          # polygon id, BBOX_WITNESS, or None
    constraint: int | None = None      # index adopted at a corner contact


@dataclass
class ExtensionResult:
    instance: Instance                 # extended polygons, same ids and bbox
    originals: tuple[Polygon, ...]
    witnesses: dict[int, dict[int, int | str]]   # pid -> edge index -> witness
    events: list[Event] = field(default_factory=list)


def _line_level_for(poly: Polygon, idx: int) -> int:
    """Level of the support line of constraint idx: the edge's own line, or
    for a degenerate edge a fresh line through its vertex (one level up)."""
    d = poly.ds.d
    idx = poly.ds.index_mod(idx)
    e = poly.edge(idx)
    if not e.degenerate and poly.line_levels is not None:
        lvl = poly.line_levels[idx - 1]
        if lvl is not None:
            return lvl
    v = e.tail
    best = 0
    for j in range(1, 2 * d + 1):
        ej = poly.edge(j)
        if ej.degenerate or v not in (ej.tail, ej.head):
            continue
        lvl = poly.line_levels[j - 1] if poly.line_levels else None
        if lvl is not None:
            best = max(best, lvl)
    return best + 1


class _Window:
    """Per (polygon, direction) linear model of the growing shape between
    two events: moving corners A(t), B(t) plus static support caps."""

    def __init__(self, ds, st: _PolyState, i: int):
        self.ds = ds
        self.d = ds.d
        self.i = i
        poly = st.tightened(ds)
        self.poly = poly
        n2 = 2 * self.d
        # first finite constraint cyclically before / after i
        def first_finite(start, step):
            j = start
            for _ in range(n2):
                j = ds.index_mod(j + step)
                if j in st.supports:
                    return j
            raise MisdopError("no finite neighbour constraint")
        self.i1 = first_finite(i, -1)
        self.i2 = first_finite(i, +1)
        e = poly.edge(i)
        self.A = e.tail
        self.B = e.head
        wi = ds.normal(i)
        v1, v2 = ds.vec(self.i1), ds.vec(self.i2)
        self.uA = (Fraction(v1[0]) / dot(v1, wi), Fraction(v1[1]) / dot(v1, wi))
        self.uB = (Fraction(v2[0]) / dot(v2, wi), Fraction(v2[1]) / dot(v2, wi))
        self.static = [v for v in poly.vertices if v != self.A and v != self.B]
        self.moving = sorted({i} | st.absent, key=ds.index_mod)
        self._caps = {}

    def pieces(self, j: int):
        """Support in direction j as max(c, a0 + t*a1, b0 + t*b1)."""
        if j not in self._caps:
            w = self.ds.normal(j)
            c = max(dot(v, w) for v in self.static) if self.static else None
            a0, a1 = dot(self.A, w), dot(self.uA, w)
            b0, b1 = dot(self.B, w), dot(self.uB, w)
            self._caps[j] = (c, a0, a1, b0, b1)
        return self._caps[j]

    def support_at(self, j: int, t: Fraction) -> Fraction:
        c, a0, a1, b0, b1 = self.pieces(j)
        vals = [a0 + a1 * t, b0 + b1 * t]
        if c is not None:
            vals.append(c)
        return max(vals)

    def last_time_below(self, j: int, bound: Fraction):
        """sup{t >= 0 : support_j(t) <= bound}: 'never', 'forever', or the
        exact Fraction at which the support passes the bound."""
        c, a0, a1, b0, b1 = self.pieces(j)
        if c is not None and c > bound:
            return "never"
        t = None
        for v0, v1 in ((a0, a1), (b0, b1)):
            if v1 > 0:
                cap = (bound - v0) / v1
                t = cap if t is None else min(t, cap)
            elif v0 > bound:
                return "never"
        if t is None:
            return "forever"
        return t if t >= 0 else "never"

    def collapse_time(self):
        """Time at which A(t) == B(t), if the neighbour lines converge."""
        num = sub(self.B, self.A)
        den = sub(self.uA, self.uB)
        # A + t uA == B + t uB  =>  t * (uA - uB) == B - A
        if den[0] == 0 and den[1] == 0:
            return None
        if den[0] == 0:
            if num[0] != 0:
                return None
            t = num[1] / den[1]
        elif den[1] == 0:
            if num[1] != 0:
                return None
            t = num[0] / den[0]
        else:
            t = num[0] / den[0]
            if num[1] / den[1] != t:
                return None
        return t if t > 0 else None


def _block_time_polygon(win: _Window, st_q: _PolyState, ds):
    """(time, argmax indices) at which the growing shape would start to
    intersect the obstacle, or None if it never does."""
    d = ds.d
    q = st_q.tightened(ds)
    # A permanently separating fixed constraint keeps the pair apart forever.
    for j in range(1, 2 * d + 1):
        if j in win.moving:
            continue
        if win.poly.support(j) + q.support(j + d) <= 0:
            return None
    best = None
    arg = []
    for j in win.moving:
        tj = win.last_time_below(j, -q.support(j + d))
        if tj == "forever":
            return None  # separated in direction j for all time
        if tj == "never":
            continue
        if best is None or tj > best:
            best, arg = tj, [j]
        elif tj == best:
            arg.append(j)
    if best is None:
        raise MisdopError("state already intersecting an obstacle")
    return best, arg


def _block_time_bbox(win: _Window, bbox: Polygon):
    """(time, argmin indices) at which containment in the box would fail."""
    best = None
    arg = []
    for b in win.moving:
        tb = win.last_time_below(b, bbox.support(b))
        if tb == "never":
            raise MisdopError("polygon escapes the bounding box")
        if tb == "forever":
            continue
        if best is None or tb < best:
            best, arg = tb, [b]
        elif tb == best:
            arg.append(b)
    return best, arg


def _overlap_1d(win: _Window, t: Fraction, q: Polygon, i: int) -> bool:
    """Does the open growing edge share a point with the obstacle's facing
    edge once both sit on the same line?"""
    ds = win.ds
    vi = ds.vec(i)
    a = dot((win.A[0] + win.uA[0] * t, win.A[1] + win.uA[1] * t), vi)
    b = dot((win.B[0] + win.uB[0] * t, win.B[1] + win.uB[1] * t), vi)
    lo, hi = min(a, b), max(a, b)
    e = q.edge(ds.index_mod(i + ds.d))
    qa, qb = dot(e.tail, vi), dot(e.head, vi)
    qlo, qhi = min(qa, qb), max(qa, qb)
    return max(lo, qlo) < min(hi, qhi) or (qlo == qhi and lo < qlo < hi)


def _overlap_1d_bbox(win: _Window, t: Fraction, bbox: Polygon, i: int) -> bool:
    vi = win.ds.vec(i)
    a = dot((win.A[0] + win.uA[0] * t, win.A[1] + win.uA[1] * t), vi)
    b = dot((win.B[0] + win.uB[0] * t, win.B[1] + win.uB[1] * t), vi)
    lo, hi = min(a, b), max(a, b)
    e = bbox.edge(i)
    qa, qb = dot(e.tail, vi), dot(e.head, vi)
    qlo, qhi = min(qa, qb), max(qa, qb)
    return max(lo, qlo) < min(hi, qhi) or (qlo == qhi and lo < qlo < hi)


def next_event(state: dict[int, _PolyState], bbox: Polygon, ds,
               pid: int, i: int) -> Event:
    """Smallest support increase of polygon pid in direction i at which an
    event fires.  Collapse beats edge contact beats corner contact on ties."""
    st = state[pid]
    assert i not in st.absent
    win = _Window(ds, st, i)

    candidates = []  # (delta, priority, witness order, event)
    t3 = win.collapse_time()
    if t3 is not None:
        candidates.append((t3, 0, (0,), Event(pid, i, t3,
                                              EventKind.EDGE_COLLAPSE, None)))

    tb, arg = _block_time_bbox(win, bbox)
    if tb is not None:
        if i in arg and _overlap_1d_bbox(win, tb, bbox, i):
            candidates.append((tb, 1, (1,), Event(pid, i, tb,
                                                  EventKind.EDGE_CONTACT,
                                                  BBOX_WITNESS)))
        else:
            adds = [b for b in arg if b != i]
            if adds:
                b = min(adds, key=ds.index_mod)
                candidates.append((tb, 2, (1, b), Event(pid, i, tb,
                                                        EventKind.CORNER_CONTACT,
                                                        BBOX_WITNESS, b)))
            else:
                candidates.append((tb, 1, (1,), Event(pid, i, tb,
                                                      EventKind.EDGE_CONTACT,
                                                      BBOX_WITNESS)))

    for qid in sorted(state):
        if qid == pid:
            continue
        res = _block_time_polygon(win, state[qid], ds)
        if res is None:
            continue
        tq, arg = res
        q = state[qid].tightened(ds)
        if i in arg and _overlap_1d(win, tq, q, i):
            candidates.append((tq, 1, (2, qid), Event(pid, i, tq,
                                                      EventKind.EDGE_CONTACT, qid)))
            continue
        adds = [j for j in arg if j != i]
        if adds:
            # Prefer a non-degenerate witness edge when several constraints
            # exhaust together.
            nd = [j for j in adds if not q.edge(ds.index_mod(j + ds.d)).degenerate]
            j = min(nd or adds, key=ds.index_mod)
            candidates.append((tq, 2, (2, qid, j), Event(pid, i, tq,
                                                         EventKind.CORNER_CONTACT,
                                                         qid, j)))
        else:
            candidates.append((tq, 1, (2, qid), Event(pid, i, tq,
                                                      EventKind.EDGE_CONTACT, qid)))

    if not candidates:
        raise MisdopError("growth is unbounded; bounding box missing?")
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    return candidates[0][3]


def apply_event(state: dict[int, _PolyState], bbox: Polygon, ds, ev: Event) -> bool:
    """Mutate the state; returns True when growth in this direction goes on."""
    st = state[ev.pid]
    st.supports[ev.direction] = st.supports[ev.direction] + ev.delta
    st.invalidate()
    if ev.kind is EventKind.EDGE_COLLAPSE:
        del st.supports[ev.direction]
        st.levels.pop(ev.direction, None)
        st.absent.add(ev.direction)
        return False
    if ev.kind is EventKind.EDGE_CONTACT:
        if ev.witness == BBOX_WITNESS:
            st.levels[ev.direction] = 1
        else:
            st.levels[ev.direction] = _line_level_for(
                state[ev.witness].tightened(ds), ev.direction + ds.d)
        return False
    # corner contact: adopt the touched line as a new tight constraint
    j = ev.constraint
    if ev.witness == BBOX_WITNESS:
        st.supports[j] = bbox.support(j)
        st.levels[j] = 1
    else:
        q = state[ev.witness].tightened(ds)
        st.supports[j] = -q.support(j + ds.d)
        st.levels[j] = _line_level_for(q, j + ds.d)
    st.absent.discard(j)
    st.invalidate()
    return True


def maximal_extension(inst: Instance) -> ExtensionResult:
    """Extend every polygon in every direction, id order within each
    direction pass.  Requires pairwise non-intersecting input."""
    adj = conflict_graph(inst)
    if any(adj[k] for k in adj):
        raise NotIndependent("input polygons intersect")

    ds = inst.ds
    state: dict[int, _PolyState] = {}
    for pid, p in enumerate(inst.polygons):
        supports, levels = {}, {}
        absent = set()
        for i in range(1, 2 * ds.d + 1):
            if p.edge(i).degenerate:
                absent.add(i)
            else:
                supports[i] = p.support(i)
                lvl = p.line_levels[i - 1] if p.line_levels else None
                if lvl is None:
                    lvl = 1
                levels[i] = lvl
        state[pid] = _PolyState(supports=supports, absent=absent, levels=levels)

    witnesses: dict[int, dict[int, int | str]] = {pid: {} for pid in state}
    events: list[Event] = []
    for i in range(1, 2 * ds.d + 1):
        for pid in sorted(state):
            if i in state[pid].absent:
                continue
            guard = 0
            while True:
                guard += 1
                if guard > 8 * ds.d + 8:
                    raise MisdopError("event loop failed to terminate")
                ev = next_event(state, inst.bbox, ds, pid, i)
                events.append(ev)
                cont = apply_event(state, inst.bbox, ds, ev)
                if ev.kind is EventKind.EDGE_CONTACT:
                    witnesses[pid][i] = ev.witness
                elif ev.kind is EventKind.CORNER_CONTACT:
                    witnesses[pid][ev.constraint] = ev.witness
                if not cont:
                    break

    extended = []
    for pid in sorted(state):
        st = state[pid]
        extended.append(tighten(ds, dict(st.supports), line_levels=dict(st.levels)))
    out = Instance(ds=ds, polygons=tuple(extended), bbox=inst.bbox)
    return ExtensionResult(instance=out, originals=inst.polygons,
                           witnesses=witnesses, events=events)
