"""Containers, fences, and fence-protection.

A container boundary alternates vertical cutting lines with fences, is
positively oriented, may touch itself but never cross.  Fences run along
polygon tops/bottoms plus the vertical contact segment of a seeing pair (or
along the original bounding box), and never meet any polygon's interior.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import (BadOrientation, CrossingFences, CuttingLineOverlap,
                     EmptySpurInterior, NotSeeing, TooManySegments)
from .geometry import (Point, chain_crosses_itself, cross, crossing_detect,
                       dedup_consecutive, intersection_points, on_segment,
                       remove_spurs, segment_intersection)
from .instance import Instance
from .polygon import Polygon, bot_chain, top_chain
from .region import (INSIDE, OUTSIDE, chain_in_closure, classify_point,
                     loop_area, point_on_loop, polygon_interior_hits_segment,
                     segment_in_closure)

CUT = "cut"
FENCE = "fence"
TOP = "top"
BOTTOM = "bottom"
LEFT = "left"
RIGHT = "right"
SYNTHETIC = -1  # source id for bounding-box derived fence pieces


@dataclass(frozen=True)
class Piece:
    role: str                      # CUT or FENCE
    chain: tuple[Point, ...]       # oriented along the boundary
    fence_kind: str | None = None  # TOP / BOTTOM for fences
    sources: tuple = ()            # polygon ids; SYNTHETIC for box pieces
    side: str | None = None        # LEFT / RIGHT for cuts

    @property
    def degenerate(self) -> bool:
        return len(self.chain) == 1

    def reversed(self) -> "Piece":
        side = None
        if self.role == CUT and self.side is not None:
            side = LEFT if self.side == RIGHT else RIGHT
        return replace(self, chain=tuple(reversed(self.chain)), side=side)


@dataclass(frozen=True)
class Container:
    pieces: tuple[Piece, ...]      # alternating CUT, FENCE, ... (cut first)

    @property
    def kappa(self) -> int:
        return sum(1 for p in self.pieces if p.role == CUT)

    def cuts(self) -> list[Piece]:
        return [p for p in self.pieces if p.role == CUT]

    def fences(self) -> list[Piece]:
        return [p for p in self.pieces if p.role == FENCE]

    def loop(self) -> tuple[Point, ...]:
        pts: list[Point] = []
        for p in self.pieces:
            pts.extend(p.chain)
        out = dedup_consecutive(pts)
        if len(out) > 1 and out[0] == out[-1]:
            out = out[:-1]
        return out

    def area(self) -> Fraction:
        return loop_area(self.loop())


@dataclass(frozen=True)
class StructuredContainer:
    container: Container
    kappa_prime: int               # cuts 0..kappa_prime-1 are left lines

    @property
    def kappa(self) -> int:
        return self.container.kappa

    def loop(self):
        return self.container.loop()


def _is_vertical(chain) -> bool:
    return all(p[0] == chain[0][0] for p in chain)


def cut_side(piece: Piece) -> str | None:
    """Left cuts run downward, right cuts upward; degenerate cuts fall back
    to their construction tag."""
    if len(piece.chain) >= 2 and piece.chain[0][1] != piece.chain[-1][1]:
        return LEFT if piece.chain[0][1] > piece.chain[-1][1] else RIGHT
    return piece.side


def polygon_as_container(p: Polygon, pid: int) -> Container:
    """A single polygon is a structured container: its vertical edges are
    the cutting lines, top and bottom its fences."""
    d = p.ds.d
    left = p.edge(d + 1)
    right = p.edge(1)
    top = top_chain(p)
    bottom = bot_chain(p)
    pieces = (
        Piece(CUT, (left.tail, left.head) if not left.degenerate else (left.tail,),
              side=LEFT),
        Piece(FENCE, bottom, fence_kind=BOTTOM, sources=(pid,)),
        Piece(CUT, (right.tail, right.head) if not right.degenerate else (right.tail,),
              side=RIGHT),
        Piece(FENCE, top, fence_kind=TOP, sources=(pid,)),
    )
    return Container(pieces=pieces)


def bbox_as_container(bbox: Polygon) -> Container:
    """The bounding box as the root structured container: left and right
    extreme verticals are the cutting lines, upper/lower hulls the fences."""
    d = bbox.ds.d
    left = bbox.edge(d + 1)
    right = bbox.edge(1)
    top_pts = dedup_consecutive([bbox.edge(2).tail]
                                + [bbox.edge(i).head for i in range(2, d + 1)])
    bot_pts = dedup_consecutive([bbox.edge(d + 2).tail]
                                + [bbox.edge(i).head for i in range(d + 2, 2 * d + 1)])
    pieces = (
        Piece(CUT, (left.tail, left.head) if not left.degenerate else (left.tail,),
              side=LEFT),
        Piece(FENCE, bot_pts, fence_kind=BOTTOM, sources=(SYNTHETIC,)),
        Piece(CUT, (right.tail, right.head) if not right.degenerate else (right.tail,),
              side=RIGHT),
        Piece(FENCE, top_pts, fence_kind=TOP, sources=(SYNTHETIC,)),
    )
    return Container(pieces=pieces)


# ---------------------------------------------------------------------------
# Validation


def validate_container(c: Container, inst: Instance | None = None,
                       max_d: int | None = None) -> None:
    """Raise a named violation if the container invariants fail."""
    pieces = c.pieces
    if not pieces or pieces[0].role != CUT:
        raise BadOrientation("boundary must start with a cutting line")
    for a, b in zip(pieces, pieces[1:] + pieces[:1]):
        if a.role == b.role:
            raise BadOrientation("cutting lines and fences must alternate")
        if a.chain[-1] != b.chain[0]:
            raise BadOrientation("boundary pieces do not share endpoints")
    k = c.kappa
    if not 2 <= k <= 5:
        raise TooManySegments(f"kappa = {k} outside [2, 5]")
    d = max_d if max_d is not None else (inst.ds.d if inst else None)
    cuts = c.cuts()
    fences = c.fences()
    for s in cuts:
        if not _is_vertical(s.chain):
            raise BadOrientation("cutting line is not vertical")
    if d is not None:
        for f in fences:
            if len(f.chain) - 1 > 2 * d + 1:
                raise TooManySegments("fence exceeds its segment budget")
        total = sum(max(len(p.chain) - 1, 1) for p in pieces)
        if total > 10 * d + 10:
            raise TooManySegments(f"boundary has {total} segments")
    # cutting lines pairwise disjoint
    for i in range(len(cuts)):
        for j in range(i + 1, len(cuts)):
            a, b = cuts[i].chain, cuts[j].chain
            if segment_intersection(a[0], a[-1], b[0], b[-1]) is not None:
                raise CuttingLineOverlap(f"cutting lines {i} and {j} intersect")
    # interior of each cut avoids all other boundary pieces
    loop = c.loop()
    for s in cuts:
        if s.degenerate:
            continue
        a, b = s.chain[0], s.chain[-1]
        for p in pieces:
            if p is s:
                continue
            contacts = []
            if len(p.chain) == 1:
                if on_segment(p.chain[0], a, b):
                    contacts.append(p.chain[0])
            for t0, t1 in zip(p.chain, p.chain[1:]):
                contacts.extend(intersection_points(
                    segment_intersection(a, b, t0, t1)))
            for q in contacts:
                if q != a and q != b:
                    raise CuttingLineOverlap(
                        "cutting line interior meets the boundary")
    # fences must not cross (pairwise or themselves)
    for f in fences:
        if chain_crosses_itself(f.chain):
            raise CrossingFences("fence crosses itself")
    for i in range(len(fences)):
        for j in range(i + 1, len(fences)):
            if crossing_detect(fences[i].chain, fences[j].chain):
                raise CrossingFences(f"fences {i} and {j} cross")
    # non-empty interior via the spur-removal criterion
    reduced = remove_spurs(loop, closed=True)
    if len(reduced) < 3:
        raise EmptySpurInterior("boundary degenerates after spur removal")
    area = loop_area(loop)
    if area < 0:
        raise BadOrientation("boundary is negatively oriented")
    if area == 0:
        raise EmptySpurInterior("boundary encloses no area")
    # fences never meet a polygon interior
    if inst is not None:
        for f in fences:
            for a, b in zip(f.chain, f.chain[1:]):
                for pid, poly in enumerate(inst.polygons):
                    if polygon_interior_hits_segment(poly, a, b):
                        raise CrossingFences(
                            f"fence meets interior of polygon {pid}")


def canonical_structured(c: Container, prefer_left: set[int] | None = None) -> StructuredContainer:
    """Rotate the boundary so the left cutting lines come first; degenerate
    cuts take whichever tag keeps the blocks consecutive."""
    pieces = list(c.pieces)
    k = c.kappa
    cut_pos = [i for i, p in enumerate(pieces) if p.role == CUT]
    sides = []
    for i in cut_pos:
        sides.append(cut_side(pieces[i]))
    # Choose tags for untagged degenerate cuts so left block is consecutive.
    n = len(sides)
    best = None
    for rot in range(n):
        seq = sides[rot:] + sides[:rot]
        for kp in range(1, n):
            ok = all(s in (LEFT, None) for s in seq[:kp]) and \
                 all(s in (RIGHT, None) for s in seq[kp:])
            if ok:
                best = (rot, kp)
                break
        if best:
            break
    if best is None:
        raise BadOrientation("left cutting lines are not consecutive")
    rot, kp = best
    start = cut_pos[rot]
    pieces = pieces[start:] + pieces[:start]
    # materialize the chosen tags
    out = []
    ci = 0
    for p in pieces:
        if p.role == CUT:
            side = LEFT if ci < kp else RIGHT
            out.append(replace(p, side=side))
            ci += 1
        else:
            out.append(p)
    return StructuredContainer(container=Container(pieces=tuple(out)),
                               kappa_prime=kp)


# ---------------------------------------------------------------------------
# Membership


def opt_in(c: Container, polygons, ids=None) -> list[int]:
    """Ids of polygons whose closure lies in the container closure and whose
    interior avoids its boundary."""
    loop = c.loop()
    out = []
    seq = list(enumerate(polygons)) if ids is None else list(zip(ids, polygons))
    for pid, poly in seq:
        if not _poly_in_container(loop, poly):
            continue
        out.append(pid)
    return out


def _poly_in_container(loop, poly: Polygon) -> bool:
    verts = list(poly.vertices)
    ring = verts + [verts[0]]
    if classify_point(loop, poly.interior_point()) != INSIDE:
        return False
    if not chain_in_closure(loop, ring):
        return False
    n = len(loop)
    for i in range(n):
        a, b = loop[i], loop[(i + 1) % n]
        if polygon_interior_hits_segment(poly, a, b):
            return False
    return True


# ---------------------------------------------------------------------------
# Fences


def top_fence_chain(p: Polygon, q: Polygon | None, sees_q: bool = True):
    """Full top-fence, left to right: top of p, vertical contact segment,
    top of q.  With q None: just the top of p."""
    left_part = tuple(reversed(top_chain(p)))
    if q is None:
        return left_part
    if not sees_q:
        raise NotSeeing("top fence requested for a non-seeing pair")
    bridge_a = p.edge(1).head
    bridge_b = q.edge(q.ds.d + 1).tail
    right_part = tuple(reversed(top_chain(q)))
    return dedup_consecutive(left_part + (bridge_a, bridge_b) + right_part)


def bot_fence_chain(p: Polygon, q: Polygon | None, sees_q: bool = True):
    """Full bottom-fence, left to right."""
    left_part = bot_chain(p)
    if q is None:
        return left_part
    if not sees_q:
        raise NotSeeing("bottom fence requested for a non-seeing pair")
    bridge_a = p.edge(1).tail
    bridge_b = q.edge(q.ds.d + 1).head
    return dedup_consecutive(left_part + (bridge_a, bridge_b) + bot_chain(q))


def fence_between(p: Polygon, q: Polygon | None, clip=None):
    """The (top, bottom) fence pair of a seeing pair, optionally clipped to
    the sub-chain between two points already on each curve."""
    from .charging import Option, TAIL, sees

    if q is not None and not sees(p, q, Option(1, TAIL)):
        raise NotSeeing("pair is not in the seeing relation")
    top = top_fence_chain(p, q)
    bot = bot_fence_chain(p, q)
    if clip is not None:
        top = subchain(top, clip[0], clip[1])
        bot = subchain(bot, clip[2], clip[3])
    return top, bot


def locate_on_chain(chain, p: Point):
    """(segment index, at_vertex) of the first traversal position hitting p,
    or None."""
    if len(chain) == 1:
        return (0, True) if chain[0] == p else None
    for i in range(len(chain) - 1):
        if chain[i] == p:
            return (i, True)
        if on_segment(p, chain[i], chain[i + 1]) and p != chain[i + 1]:
            return (i, False)
    if chain[-1] == p:
        return (len(chain) - 1, True)
    return None


def chain_suffix(chain, p: Point):
    """Sub-chain from p (on the chain) to the end."""
    loc = locate_on_chain(chain, p)
    if loc is None:
        return None
    i, at_vertex = loc
    return dedup_consecutive((p,) + tuple(chain[i + (1 if not at_vertex else 0):]))


def chain_prefix(chain, p: Point):
    loc = locate_on_chain(chain, p)
    if loc is None:
        return None
    i, at_vertex = loc
    return dedup_consecutive(tuple(chain[:i + 1]) + (p,))


def subchain(chain, a: Point, b: Point):
    suf = chain_suffix(chain, a)
    if suf is None:
        return None
    return chain_prefix(suf, b)


def fence_chain_ok(chain, d: int) -> bool:
    """Fence curve shape: within the segment budget and with non-vertical
    first and last segments (singletons allowed)."""
    ch = dedup_consecutive(chain)
    if len(ch) == 1:
        return True
    if len(ch) - 1 > 2 * d + 1:
        return False
    if ch[0][0] == ch[1][0] or ch[-1][0] == ch[-2][0]:
        return False
    return True


def chain_contains(chain, sub) -> bool:
    """Point-set containment of one chain's carrier in another's."""
    if len(sub) == 1:
        return any(on_segment(sub[0], chain[i], chain[i + 1])
                   for i in range(len(chain) - 1)) or sub[0] in chain
    for a, b in zip(sub, sub[1:]):
        if not _segment_covered(chain, a, b):
            return False
    return True


def _segment_covered(chain, a: Point, b: Point) -> bool:
    cuts = {Fraction(0), Fraction(1)}
    from .geometry import dot, sub as vsub
    d = vsub(b, a)
    den = d[0] * d[0] + d[1] * d[1]
    for i in range(len(chain) - 1):
        x = segment_intersection(a, b, chain[i], chain[i + 1])
        for q in intersection_points(x):
            cuts.add(dot(vsub(q, a), d) / den)
    ts = sorted(t for t in cuts if 0 <= t <= 1)
    for t0, t1 in zip(ts, ts[1:]):
        tm = (t0 + t1) / 2
        mid = (a[0] + d[0] * tm, a[1] + d[1] * tm)
        if not any(on_segment(mid, chain[i], chain[i + 1])
                   for i in range(len(chain) - 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# Protection


@dataclass(frozen=True)
class ProtectionWitness:
    pid: int
    side: str                   # LEFT or RIGHT
    cut_index: int              # index into container.cuts()
    upper: tuple[Point, ...]    # fence covering the top, left to right
    lower: tuple[Point, ...]
    upper_sources: tuple
    lower_sources: tuple


def _seg_meets_cut(cut: Piece, chain):
    """Points where a vertical cut segment meets a fence chain, preferring
    endpoints of the intersection; sorted deterministically."""
    a, b = cut.chain[0], cut.chain[-1]
    hits = []
    if len(chain) == 1:
        if on_segment(chain[0], a, b):
            hits.append(chain[0])
        return hits
    for i in range(len(chain) - 1):
        x = segment_intersection(a, b, chain[i], chain[i + 1])
        hits.extend(intersection_points(x))
    return sorted(set(hits))


def witness_valid(w: ProtectionWitness, sc: StructuredContainer,
                  inst: Instance) -> bool:
    """Re-check a stored witness from scratch: fences of the declared shape,
    emerging from the declared cut, covering the polygon's top and bottom,
    inside the container, clear of every polygon interior."""
    c = sc.container
    cuts = c.cuts()
    if not 0 <= w.cut_index < len(cuts):
        return False
    s = cuts[w.cut_index]
    tagged = cut_side(s)
    if tagged is not None and tagged != w.side:
        return False
    p = inst.polygons[w.pid]
    d = inst.ds.d
    if w.side == LEFT:
        ends = (p.edge(1).head, p.edge(1).tail)       # upper tip, lower tip
    else:
        ends = (p.edge(d + 1).tail, p.edge(d + 1).head)
    loop = c.loop()
    for chain, cover, end in ((w.upper, top_chain(p), ends[0]),
                              (w.lower, bot_chain(p), ends[1])):
        ch = dedup_consecutive(chain)
        if not fence_chain_ok(ch, d):
            return False
        if w.side == LEFT:
            anchor, tip = ch[0], ch[-1]
        else:
            anchor, tip = ch[-1], ch[0]
        if tip != end:
            return False
        if not on_segment(anchor, s.chain[0], s.chain[-1]):
            return False
        if not chain_contains(ch, cover):
            return False
        if not chain_in_closure(loop, ch):
            return False
        for a, b in zip(ch, ch[1:]):
            for poly in inst.polygons:
                if polygon_interior_hits_segment(poly, a, b):
                    return False
    return True


def find_protection(pid: int, sc: StructuredContainer, inst: Instance,
                    seers: dict[int, list[int]], seen: dict[int, list[int]],
                    want_side: str | None = None):
    """Search the canonical candidates for a Def-6 witness: the polygon's own
    chains when its vertical edge lies on a cutting line, or fences running
    along the unique seer (left) / any seen partner (right) that meet the
    cutting line.  Returns the first witness found, or None."""
    c = sc.container
    p = inst.polygons[pid]
    d = inst.ds.d
    loop = c.loop()
    cuts = c.cuts()
    for side in ([want_side] if want_side else [LEFT, RIGHT]):
        for ci, s in enumerate(cuts):
            if cut_side(s) is not None and cut_side(s) != side:
                continue
            w = _try_protection(pid, p, side, ci, s, sc, inst, seers, seen, loop)
            if w is not None:
                return w
    return None


def _try_protection(pid, p, side, ci, s: Piece, sc, inst, seers, seen, loop):
    d = inst.ds.d
    a, b = s.chain[0], s.chain[-1]
    if side == LEFT:
        own = p.edge(d + 1)
        partners = seers.get(pid, [])
    else:
        own = p.edge(1)
        partners = seen.get(pid, [])
    # self case: the facing vertical edge lies on the cutting line
    if on_segment(own.tail, a, b) and on_segment(own.head, a, b):
        upper = tuple(reversed(top_chain(p)))
        lower = bot_chain(p)
        w = ProtectionWitness(pid=pid, side=side, cut_index=ci,
                              upper=upper, lower=lower,
                              upper_sources=(pid,), lower_sources=(pid,))
        if witness_valid(w, sc, inst):
            return w
    for rid in partners:
        r = inst.polygons[rid]
        if side == LEFT:
            top_f = top_fence_chain(r, p)
            bot_f = bot_fence_chain(r, p)
            upper = _emerging_subchain(top_f, s, suffix=True)
            lower = _emerging_subchain(bot_f, s, suffix=True)
            srcs = (rid, pid)
        else:
            top_f = top_fence_chain(p, r)
            bot_f = bot_fence_chain(p, r)
            upper = _emerging_subchain(top_f, s, suffix=False)
            lower = _emerging_subchain(bot_f, s, suffix=False)
            srcs = (pid, rid)
        if upper is None or lower is None:
            continue
        w = ProtectionWitness(pid=pid, side=side, cut_index=ci,
                              upper=upper, lower=lower,
                              upper_sources=srcs, lower_sources=srcs)
        if witness_valid(w, sc, inst):
            return w
    return None


def _emerging_subchain(fence, s: Piece, suffix: bool):
    """Clip a full left-to-right fence at the cutting line: keep the part
    right of it (suffix) or left of it (prefix), choosing the hit point that
    leaves a non-vertical first/last segment."""
    hits = _seg_meets_cut(s, fence)
    if not hits:
        return None
    for h in (hits if suffix else list(reversed(hits))):
        ch = chain_suffix(fence, h) if suffix else chain_prefix(fence, h)
        if ch is None:
            continue
        ch = dedup_consecutive(ch)
        if len(ch) == 1:
            return ch
        if suffix and ch[0][0] == ch[1][0]:
            continue
        if not suffix and ch[-1][0] == ch[-2][0]:
            continue
        return ch
    return None
