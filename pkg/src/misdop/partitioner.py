"""Recursive partitioning: the constructive bipartition step, the certificate
builder with charging bookkeeping, and an independent verifier.

Every step splits a structured container along a curve made of fence pieces
plus one vertical segment; only polygons hit by that vertical segment are
lost, protected polygons are never hit, and protection survives into the
children.  The builder charges each lost accountable polygon to a polygon it
sees, which from then on stays protected and ends up alone in a leaf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .charging import Option, TAIL, seen_map
from .containers import (BOTTOM, CUT, FENCE, LEFT, RIGHT, SYNTHETIC, Container,
                         Piece, ProtectionWitness, StructuredContainer,
                         bbox_as_container, bot_fence_chain, canonical_structured,
                         chain_prefix, chain_suffix, cut_side, fence_chain_ok,
                         find_protection, opt_in, polygon_as_container,
                         top_fence_chain, validate_container, witness_valid, TOP)
from .errors import (ChargeCollision, ContainerInvalid, LostProtected,
                     MisdopError, NoValidCut)
from .geometry import (Point, dedup_consecutive, on_segment,
                       segment_intersection, intersection_points)
from .instance import Instance
from .polygon import Polygon, bot_chain, polygon_from_vertices, top_chain
from .region import classify_point, INSIDE, loop_area, polygon_interior_hits_segment

CASES = ("A1", "A2", "A3", "A4", "A5", "B1", "B2", "C1", "C2", "C3", "K2", "Z")


@dataclass
class PartitionStep:
    case: str
    gamma: tuple[Piece, ...]
    ell: tuple[Point, Point]
    child1: StructuredContainer
    child2: StructuredContainer
    lost: tuple[int, ...]
    mirrored: bool = False


# ---------------------------------------------------------------------------
# Boundary splitting


def _locate(pieces, p: Point):
    """(piece index, vertex index, exact) for the first boundary position at
    point p; exact=False means p is interior to segment [vi, vi+1]."""
    for pi, piece in enumerate(pieces):
        ch = piece.chain
        for vi in range(len(ch)):
            if ch[vi] == p:
                return (pi, vi, True)
            if vi + 1 < len(ch) and on_segment(p, ch[vi], ch[vi + 1]) \
                    and p != ch[vi + 1]:
                return (pi, vi, False)
    return None


def _walk(pieces, start, end, start_pt: Point, end_pt: Point):
    """Boundary pieces from start position to end position (cyclic), clipped
    to the two points."""
    n = len(pieces)
    spi, svi, _ = start
    epi, evi, _ = end
    out = []

    def clipped(piece, frm=None, to=None):
        ch = piece.chain
        if frm is not None:
            ch = chain_suffix(ch, frm)
        if to is not None:
            ch = chain_prefix(ch, to)
        return replace(piece, chain=dedup_consecutive(ch))

    if spi == epi:
        ch = pieces[spi].chain
        la = _pos_key(ch, start_pt, svi)
        lb = _pos_key(ch, end_pt, evi)
        if la <= lb:
            out.append(clipped(pieces[spi], frm=start_pt, to=end_pt))
            return out
    cur = spi
    out.append(clipped(pieces[cur], frm=start_pt))
    while True:
        cur = (cur + 1) % n
        if cur == epi:
            out.append(clipped(pieces[cur], to=end_pt))
            break
        out.append(clipped(pieces[cur], to=None))
        if cur == spi:
            raise MisdopError("boundary walk failed to terminate")
    return out


def _pos_key(chain, p: Point, vi: int):
    return (vi, 0 if p == chain[vi] else 1)


def _vertical_runs_to_cuts(pieces):
    """Promote leading/trailing vertical runs of fence chains into cutting
    pieces so fences start and end non-vertically."""
    out = []
    for piece in pieces:
        if piece.role != FENCE or len(piece.chain) < 2:
            out.append(piece)
            continue
        ch = list(piece.chain)
        lead = 1
        while lead < len(ch) and ch[lead][0] == ch[0][0]:
            lead += 1
        lead -= 1
        trail = len(ch) - 2
        while trail >= 0 and ch[trail][0] == ch[-1][0]:
            trail -= 1
        trail += 1
        if lead >= len(ch) - 1:
            # fully vertical fence chain: becomes a cut
            out.append(replace(piece, role=CUT, fence_kind=None, sources=(),
                               side=None))
            continue
        if lead > 0:
            out.append(Piece(CUT, tuple(ch[:lead + 1])))
            ch = ch[lead:]
            trail -= lead
        if trail < len(ch) - 1:
            out.append(replace(piece, chain=tuple(ch[:trail + 1])))
            out.append(Piece(CUT, tuple(ch[trail:])))
        else:
            out.append(replace(piece, chain=tuple(ch)))
    return out


def _merge_cut_chains(a: Piece, b: Piece) -> Piece | None:
    if a.chain[0][0] != b.chain[0][0]:
        return None
    pts = dedup_consecutive(a.chain + b.chain)
    first, last = pts[0], pts[-1]
    side = a.side if a.side is not None else b.side
    if first == last:
        return Piece(CUT, (first,), side=side)
    return Piece(CUT, (first, last), side=side)


def _fences_mergeable(a: Piece, b: Piece, d: int) -> Piece | None:
    ch = dedup_consecutive(a.chain + b.chain)
    if not fence_chain_ok(ch, d):
        return None
    xs = [p[0] for p in ch]
    inc = all(x1 <= x2 for x1, x2 in zip(xs, xs[1:]))
    dec = all(x1 >= x2 for x1, x2 in zip(xs, xs[1:]))
    if not (inc or dec):
        return None
    kind = a.fence_kind if a.fence_kind == b.fence_kind else None
    srcs = tuple(dict.fromkeys(a.sources + b.sources))
    if kind is None or len([s for s in srcs if s != SYNTHETIC]) > 2:
        return None
    return Piece(FENCE, ch, fence_kind=kind, sources=srcs)


def normalize_pieces(pieces, d: int) -> tuple[Piece, ...]:
    """Clean an assembled boundary: drop empty fences, promote vertical runs
    into cuts, merge collinear cuts, separate or merge adjacent fences."""
    work = [replace(p, chain=dedup_consecutive(p.chain)) for p in pieces
            if p.chain]
    work = [p for p in work if not (p.role == FENCE and len(p.chain) == 1)]
    work = _vertical_runs_to_cuts(work)

    changed = True
    while changed and len(work) > 1:
        changed = False
        n = len(work)
        for i in range(n):
            j = (i + 1) % n
            a, b = work[i], work[j]
            if a.role != b.role:
                continue
            if a.role == CUT:
                m = _merge_cut_chains(a, b)
                if m is None:
                    raise NoValidCut("adjacent cutting lines cannot merge")
                repl = [m]
            else:
                m = _fences_mergeable(a, b, d)
                repl = [m] if m is not None else [a, Piece(CUT, (a.chain[-1],)), b]
            if j > i:
                work = work[:i] + repl + work[j + 1:]
            elif len(repl) == 1:
                work = repl + work[1:i]
            else:
                work = work + [repl[1]]
            changed = True
            break
    for k, p in enumerate(work):
        if p.role == CUT:
            work = work[k:] + work[:k]
            break
    else:
        raise NoValidCut("assembled boundary has no cutting line")
    return tuple(work)


def split_container(sc: StructuredContainer, gamma: list[Piece], d: int):
    """Children obtained by cutting the container along gamma (oriented from
    a boundary point a to a boundary point b)."""
    pieces = sc.container.pieces
    a = gamma[0].chain[0]
    b = gamma[-1].chain[-1]
    pa = _locate(pieces, a)
    pb = _locate(pieces, b)
    if pa is None or pb is None:
        raise NoValidCut("separating curve does not start/end on the boundary")

    def attempt(g, start, end, start_pt, end_pt):
        keep = _walk(pieces, start, end, start_pt, end_pt)
        other = _walk(pieces, end, start, end_pt, start_pt)
        g_rev = [p.reversed() for p in reversed(g)]
        c1 = Container(pieces=normalize_pieces(list(g) + keep, d))
        c2 = Container(pieces=normalize_pieces(other + g_rev, d))
        if loop_area(c1.loop()) < 0 or loop_area(c2.loop()) < 0:
            raise NoValidCut("split produced a negatively oriented child")
        return c1, c2

    try:
        return attempt(gamma, pb, pa, b, a)
    except (NoValidCut, ContainerInvalid):
        gamma_rev = [p.reversed() for p in reversed(gamma)]
        return attempt(gamma_rev, pa, pb, a, b)


# ---------------------------------------------------------------------------
# Protection table and the vertical scan


def protection_table(sc: StructuredContainer, inst: Instance, inside,
                     seers, smap):
    """pid -> {(side, cut index): witness} over all geometric protections."""
    from .containers import _try_protection

    c = sc.container
    loop = c.loop()
    cuts = c.cuts()
    table = {}
    for pid in inside:
        poly = inst.polygons[pid]
        wm = {}
        for side in (LEFT, RIGHT):
            for ci, s in enumerate(cuts):
                tagged = cut_side(s)
                if tagged is not None and tagged != side:
                    continue
                w = _try_protection(pid, poly, side, ci, s, sc, inst,
                                    seers, smap, loop)
                if w is not None:
                    wm[(side, ci)] = w
        table[pid] = wm
    return table


def _fence_point_at_x(chain, x, prefer_low: bool):
    """Point of a weakly monotone fence chain on the vertical line x, taking
    the lower or upper end when the chain has a vertical piece there."""
    ys = []
    if len(chain) == 1:
        if chain[0][0] == x:
            ys.append(chain[0][1])
    for a, b in zip(chain, chain[1:]):
        if a[0] == b[0] == x:
            ys.extend([a[1], b[1]])
        elif min(a[0], b[0]) <= x <= max(a[0], b[0]) and a[0] != b[0]:
            t = (x - a[0]) / (b[0] - a[0])
            ys.append(a[1] + t * (b[1] - a[1]))
    if not ys:
        return None
    return (x, min(ys) if prefer_low else max(ys))


def _scan(sc: StructuredContainer, inst: Instance, protected, x0, y0,
          upward: bool, exclude=()):
    """First qualifying point on the vertical line at or past y0.

    Qualifying points lie on the container boundary or on the open top or
    bottom chain of a protected polygon.  Returns (point, hits) where hits
    name every object passing through the chosen point."""
    cands = []  # (y, kind, data)
    pieces = sc.container.pieces
    ci = fi = 0
    for piece in pieces:
        tag = ("cut", ci) if piece.role == CUT else ("fence", fi)
        if piece.role == CUT:
            ci += 1
        else:
            fi += 1
        ch = piece.chain
        pts = []
        if len(ch) == 1:
            if ch[0][0] == x0:
                pts.append(ch[0][1])
        for a, b in zip(ch, ch[1:]):
            if a[0] == b[0] == x0:
                lo, hi = min(a[1], b[1]), max(a[1], b[1])
                if upward:
                    if hi >= y0:
                        pts.append(max(lo, y0))
                else:
                    if lo <= y0:
                        pts.append(min(hi, y0))
            elif min(a[0], b[0]) <= x0 <= max(a[0], b[0]) and a[0] != b[0]:
                t = (x0 - a[0]) / (b[0] - a[0])
                pts.append(a[1] + t * (b[1] - a[1]))
        for y in pts:
            if (upward and y >= y0) or (not upward and y <= y0):
                cands.append((y, tag[0], tag[1]))
    for pid in protected:
        poly = inst.polygons[pid]
        for name, chain in (("top", top_chain(poly)), ("bot", bot_chain(poly))):
            if len(chain) < 2:
                continue  # degenerate chain carries no open points
            tip_a, tip_b = chain[0], chain[-1]
            for a, b in zip(chain, chain[1:]):
                if min(a[0], b[0]) <= x0 <= max(a[0], b[0]) and a[0] != b[0]:
                    t = (x0 - a[0]) / (b[0] - a[0])
                    y = a[1] + t * (b[1] - a[1])
                    p = (x0, y)
                    if p == tip_a or p == tip_b:
                        continue
                    if (upward and y >= y0) or (not upward and y <= y0):
                        cands.append((y, "poly", (pid, name)))
    cands = [c for c in cands if (c[1], c[2]) not in exclude]
    if not cands:
        raise NoValidCut("vertical scan found no qualifying point")
    best = min(c[0] for c in cands) if upward else max(c[0] for c in cands)
    hits = [(k, d) for y, k, d in cands if y == best]
    return (x0, best), hits


def _hit_kinds(hits, anchor_ci, kappa):
    """Summarize scan hits: ('cut', ci) / ('adj', fi) / ('far', fi) /
    ('poly', pid, chain) with boundary hits preferred in that order."""
    adj = {(anchor_ci - 1) % kappa, anchor_ci % kappa}
    cuts = sorted(d for k, d in hits if k == "cut")
    fences = sorted(d for k, d in hits if k == "fence")
    polys = sorted(d for k, d in hits if k == "poly")
    if cuts:
        return ("cut", cuts[0])
    near = [f for f in fences if f in adj]
    if near:
        return ("adj", near[0])
    if fences:
        return ("far", fences[0])
    if polys:
        return ("poly",) + tuple(polys[0])
    raise NoValidCut("scan hit nothing classifiable")


# ---------------------------------------------------------------------------
# The case machine


def _gamma_cut(a: Point, b: Point) -> Piece:
    return Piece(CUT, (a, b) if a != b else (a,))


def _fence_piece(chain, kind, sources) -> Piece:
    return Piece(FENCE, dedup_consecutive(chain), fence_kind=kind,
                 sources=sources)


def _build_step(case, sc, inst, gamma, ell, inside, mirrored=False):
    d = inst.ds.d
    gamma = [p for p in gamma
             if not (p.role == FENCE and len(dedup_consecutive(p.chain)) == 1)]
    gamma = [replace(p, chain=dedup_consecutive(p.chain)) for p in gamma]
    c1, c2 = split_container(sc, gamma, d)
    sc1 = canonical_structured(c1)
    sc2 = canonical_structured(c2)
    validate_container(c1, inst)
    validate_container(c2, inst)
    in1 = set(opt_in(c1, inst.polygons, ids=inside))
    in2 = set(opt_in(c2, inst.polygons, ids=inside))
    lost = tuple(sorted(set(inside) - in1 - in2))
    if in1 & in2:
        raise NoValidCut(f"polygons {sorted(in1 & in2)} landed in both children")
    for pid in lost:
        if not polygon_interior_hits_segment(inst.polygons[pid], ell[0], ell[1]):
            raise NoValidCut(
                f"lost polygon {pid} is not cut by the vertical segment ({case})")
    return PartitionStep(case=case, gamma=tuple(gamma), ell=ell,
                         child1=sc1, child2=sc2, lost=lost, mirrored=mirrored)


def _point_hits(sc, inst, protected, p: Point, anchor_ci):
    """Classify which boundary pieces / protected chains pass through p."""
    hits = []
    ci = fi = 0
    for piece in sc.container.pieces:
        tag = ("cut", ci) if piece.role == CUT else ("fence", fi)
        if piece.role == CUT:
            ci += 1
        else:
            fi += 1
        ch = piece.chain
        onit = (len(ch) == 1 and ch[0] == p) or any(
            on_segment(p, a, b) for a, b in zip(ch, ch[1:]))
        if onit:
            hits.append((tag[0], tag[1]))
    for pid in protected:
        poly = inst.polygons[pid]
        for name, chain in (("top", top_chain(poly)), ("bot", bot_chain(poly))):
            if len(chain) < 2:
                continue
            if p in (chain[0], chain[-1]):
                continue
            if any(on_segment(p, a, b) for a, b in zip(chain, chain[1:])):
                hits.append(("poly", (pid, name)))
    return hits


def _partition_step_raw(sc: StructuredContainer, inst: Instance, smap, seers,
                        mirrored=False) -> PartitionStep:
    d = inst.ds.d
    c = sc.container
    inside = opt_in(c, inst.polygons)
    if len(inside) < 2:
        raise NoValidCut("container holds fewer than two polygons")
    cuts = c.cuts()
    fences = c.fences()
    k = sc.kappa
    anchor_ci = 1 if k >= 3 else 0
    prot = protection_table(sc, inst, inside, seers, smap)
    protected = {pid for pid in inside if prot[pid]}

    cands = [pid for pid in inside if (LEFT, anchor_ci) in prot[pid]]
    if not cands:
        return _dispatch_no_p0(sc, inst, smap, seers, inside, prot, protected,
                               anchor_ci, mirrored)

    p0 = max(cands, key=lambda pid: (inst.polygons[pid].support(1), -pid))
    poly0 = inst.polygons[p0]
    w0 = prot[p0][(LEFT, anchor_ci)]

    if k == 2 and _k2_special(sc, w0):
        return _dispatch_k2(sc, inst, seers, inside, p0, mirrored)

    e1 = poly0.edge(1)
    t_pt, h_pt = e1.tail, e1.head
    x0 = poly0.support(1)

    # interior of the right edge meeting a boundary fence forces a detour
    bridge = _edge_fence_overlap(sc, t_pt, h_pt)
    if bridge is not None:
        return _dispatch_b2(sc, inst, smap, seers, inside, prot, protected,
                            anchor_ci, p0, w0, bridge, mirrored)

    ph, hits_h = _scan(sc, inst, protected - {p0}, x0, h_pt[1], upward=True)
    pt, hits_t = _scan(sc, inst, protected - {p0}, x0, t_pt[1], upward=False)
    kind_h = _hit_kinds(hits_h, anchor_ci, k)
    kind_t = _hit_kinds(hits_t, anchor_ci, k)
    return _dispatch_cases(sc, inst, prot, anchor_ci, p0, w0, ph, kind_h,
                           pt, kind_t, inside, mirrored)


def _edge_fence_overlap(sc, t_pt, h_pt):
    """Vertical fence sub-segment meeting the open right edge (t, h); returns
    (fence index, seg lo, seg hi) or None."""
    if t_pt == h_pt:
        return None
    x0 = t_pt[0]
    fi = 0
    for piece in sc.container.pieces:
        if piece.role != FENCE:
            continue
        ch = piece.chain
        for a, b in zip(ch, ch[1:]):
            x = segment_intersection(t_pt, h_pt, a, b)
            pts = intersection_points(x)
            inner = [q for q in pts if q != t_pt and q != h_pt]
            if not inner and len(pts) == 2:
                inner = pts
            if inner:
                if a[0] == b[0] == x0:
                    lo = min(a, b, key=lambda p: p[1])
                    hi = max(a, b, key=lambda p: p[1])
                    # orientation within the fence: tail first
                    return (fi, a, b)
                # non-vertical fence segment can only touch the open edge at
                # a point; that is a touch, not an overlap requiring a detour
        fi += 1
    return None


def _k2_special(sc, w0) -> bool:
    from .containers import chain_contains
    upper = [f for f in sc.container.fences()]
    if len(upper) != 2:
        return False
    fa, fb = upper
    # identify which boundary fence is the upper one by mean position
    def covers(w_chain, f):
        return chain_contains(w_chain, f.chain) and chain_contains(f.chain, w_chain)
    return (covers(w0.upper, fa) or covers(w0.upper, fb)) and \
           (covers(w0.lower, fa) or covers(w0.lower, fb))


def _dispatch_k2(sc, inst, seers, inside, p0, mirrored):
    d = inst.ds.d
    poly0 = inst.polygons[p0]
    seer_ids = [i for i in seers.get(p0, []) if i in inside]
    if not seer_ids:
        raise NoValidCut("two-cut special case without a seeing partner")
    p0p = seer_ids[0]
    polyp = inst.polygons[p0p]
    e_right = polyp.edge(1)
    e_left = poly0.edge(d + 1)
    x = segment_intersection(e_right.tail, e_right.head, e_left.tail, e_left.head)
    pts = intersection_points(x)
    if not pts:
        raise NoValidCut("seeing partners share no contact segment")
    lo = min(pts)
    hi = max(pts)
    c1 = polygon_as_container(polyp, p0p)
    c2 = polygon_as_container(poly0, p0)
    sc1 = canonical_structured(c1)
    sc2 = canonical_structured(c2)
    validate_container(c1, inst)
    validate_container(c2, inst)
    area_sum = c1.area() + c2.area()
    if area_sum != sc.container.area():
        raise NoValidCut("two-cut special split does not tile the container")
    gamma = (Piece(CUT, (lo, hi) if lo != hi else (lo,)),)
    return PartitionStep(case="K2", gamma=gamma, ell=(lo, hi),
                         child1=sc1, child2=sc2, lost=(), mirrored=mirrored)


def _witness_for(prot, pid, side, anchor_ci=None):
    """A stored witness of the given side, preferring the anchor cut."""
    wm = prot.get(pid, {})
    keys = [kc for kc in wm if kc[0] == side]
    if not keys:
        return None
    keys.sort(key=lambda kc: (kc[1] != anchor_ci, kc[1]))
    return wm[keys[0]]


def _dispatch_cases(sc, inst, prot, anchor_ci, p0, w0, ph, kind_h, pt, kind_t,
                    inside, mirrored):
    poly0 = inst.polygons[p0]
    e1 = poly0.edge(1)
    t_pt, h_pt = e1.tail, e1.head
    up_gamma = _fence_piece(w0.upper, TOP, w0.upper_sources)
    low_gamma = _fence_piece(w0.lower, BOTTOM, w0.lower_sources)

    # B1: a scan endpoint sits on a cutting line
    if kind_h[0] == "cut" or kind_t[0] == "cut":
        if kind_h[0] == "cut":
            gamma = [up_gamma, _gamma_cut(h_pt, ph)]
            ell = (h_pt, ph)
        else:
            gamma = [low_gamma, _gamma_cut(t_pt, pt)]
            ell = (pt, t_pt)
        return _build_step("B1", sc, inst, gamma, ell, inside, mirrored)

    # A1: both ends on the fences adjacent to the anchor cut
    if kind_h[0] == "adj" and kind_t[0] == "adj":
        gamma = [_gamma_cut(ph, pt)]
        return _build_step("A1", sc, inst, gamma, (ph, pt), inside, mirrored)

    # A2: an end on a non-adjacent fence
    if kind_t[0] == "far":
        gamma = [up_gamma, _gamma_cut(h_pt, pt)]
        return _build_step("A2", sc, inst, gamma, (pt, h_pt), inside, mirrored)
    if kind_h[0] == "far":
        gamma = [low_gamma, _gamma_cut(t_pt, ph)]
        return _build_step("A2", sc, inst, gamma, (t_pt, ph), inside, mirrored)

    wh = _witness_for(prot, kind_h[1], RIGHT) if kind_h[0] == "poly" else None
    wt = _witness_for(prot, kind_t[1], RIGHT) if kind_t[0] == "poly" else None

    # A3: the blocking polygon is protected from the right
    if wh is not None:
        delta = chain_suffix(wh.lower, ph)
        if delta is not None:
            gamma = [up_gamma, _gamma_cut(h_pt, ph),
                     _fence_piece(delta, BOTTOM, wh.lower_sources)]
            return _build_step("A3", sc, inst, gamma, (h_pt, ph), inside, mirrored)
    if wt is not None:
        delta = chain_suffix(wt.upper, pt)
        if delta is not None:
            gamma = [low_gamma, _gamma_cut(t_pt, pt),
                     _fence_piece(delta, TOP, wt.upper_sources)]
            return _build_step("A3", sc, inst, gamma, (pt, t_pt), inside, mirrored)

    lh = _witness_for(prot, kind_h[1], LEFT) if kind_h[0] == "poly" else None
    lt = _witness_for(prot, kind_t[1], LEFT) if kind_t[0] == "poly" else None

    # A4: both blocking polygons protected from the left
    if lh is not None and lt is not None:
        dh = chain_prefix(lh.lower, ph)
        dt = chain_prefix(lt.upper, pt)
        if dh is not None and dt is not None:
            gamma = [_fence_piece(dh, BOTTOM, lh.lower_sources),
                     _gamma_cut(ph, pt),
                     _fence_piece(tuple(reversed(dt)), TOP, lt.upper_sources)]
            return _build_step("A4", sc, inst, gamma, (ph, pt), inside, mirrored)

    # A5: one side on an adjacent fence, the other on a left-protected polygon
    if kind_h[0] == "adj" and lt is not None:
        dt = chain_prefix(lt.upper, pt)
        if dt is not None:
            gamma = [_gamma_cut(ph, pt),
                     _fence_piece(tuple(reversed(dt)), TOP, lt.upper_sources)]
            return _build_step("A5", sc, inst, gamma, (ph, pt), inside, mirrored)
    if kind_t[0] == "adj" and lh is not None:
        dh = chain_prefix(lh.lower, ph)
        if dh is not None:
            gamma = [_fence_piece(dh, BOTTOM, lh.lower_sources),
                     _gamma_cut(ph, pt)]
            return _build_step("A5", sc, inst, gamma, (ph, pt), inside, mirrored)

    raise NoValidCut(
        f"no case applies: h hit {kind_h}, t hit {kind_t}")


def _dispatch_b2(sc, inst, smap, seers, inside, prot, protected, anchor_ci,
                 p0, w0, bridge, mirrored):
    """The right edge of the chosen polygon runs along a boundary fence; cut
    beside the fence's vertical piece instead of scanning blindly."""
    fi, ea, eb = bridge
    poly0 = inst.polygons[p0]
    e1 = poly0.edge(1)
    t_pt, h_pt = e1.tail, e1.head
    up_gamma = _fence_piece(w0.upper, TOP, w0.upper_sources)
    low_gamma = _fence_piece(w0.lower, BOTTOM, w0.lower_sources)
    fence_piece = sc.container.fences()[fi]
    ltr = fence_piece.chain[0][0] <= fence_piece.chain[-1][0]

    k = sc.kappa
    adjacent = fi == (anchor_ci % k)
    before = fi == ((anchor_ci - 1) % k)
    if ltr and not adjacent:
        p = min(ea, h_pt, key=lambda q: q[1])
        gamma = [up_gamma, _gamma_cut(h_pt, p)]
        return _build_step("B2", sc, inst, gamma, (p, h_pt), inside, mirrored)
    if (not ltr) and not before:
        p = max(eb, t_pt, key=lambda q: q[1])
        gamma = [low_gamma, _gamma_cut(t_pt, p)]
        return _build_step("B2", sc, inst, gamma, (t_pt, p), inside, mirrored)
    # the fence adjacent to the anchor: re-anchor one scan endpoint on the
    # bridge and push the other through the normal case analysis
    if ltr:
        pt = ea
        kind_t = ("adj", fi)
        ph, hits_h = _scan(sc, inst, protected - {p0}, t_pt[0], h_pt[1],
                           upward=True)
        kind_h = _hit_kinds(hits_h, anchor_ci, k)
    else:
        ph = eb
        kind_h = ("adj", fi)
        pt, hits_t = _scan(sc, inst, protected - {p0}, t_pt[0], t_pt[1],
                           upward=False)
        kind_t = _hit_kinds(hits_t, anchor_ci, k)
    step = _dispatch_cases(sc, inst, prot, anchor_ci, p0, w0, ph, kind_h,
                           pt, kind_t, inside, mirrored)
    return replace(step, case="B2")


def _find_tip_polygon(inst, inside, prot, tip, chain_name, via_cut, fence_piece):
    """Special polygon leaning on a tip of the anchor cut (the C2 shapes)."""
    from .containers import chain_contains
    for pid in sorted(inside):
        poly = inst.polygons[pid]
        chain = bot_chain(poly) if chain_name == "bot" else top_chain(poly)
        if len(chain) < 2 or tip in (chain[0], chain[-1]):
            continue
        if not any(on_segment(tip, a, b) for a, b in zip(chain, chain[1:])):
            continue
        w = prot.get(pid, {}).get((LEFT, via_cut))
        if w is None:
            continue
        mu = w.upper if chain_name == "bot" else w.lower
        if chain_contains(mu, fence_piece.chain):
            return pid, w
    return None


def _cut_x_candidates(inst, inside, xa, extra):
    d = inst.ds.d
    xs = {-inst.polygons[pid].support(d + 1) for pid in inside}
    xs |= set(extra)
    return sorted(x for x in xs if x > xa)


def _dispatch_no_p0(sc, inst, smap, seers, inside, prot, protected, anchor_ci,
                    mirrored):
    c = sc.container
    cuts = c.cuts()
    fences = c.fences()
    k = sc.kappa
    anchor = cuts[anchor_ci]
    xa = anchor.chain[0][0]
    bci = (anchor_ci - 1) % k
    aci = (anchor_ci + 1) % k
    f_before = fences[bci]
    f_after = fences[anchor_ci % k]
    x_before = cuts[bci].chain[0][0]
    x_after = cuts[aci].chain[0][0]
    top_tip = anchor.chain[0]
    bot_tip = anchor.chain[-1]

    p1 = p3 = None
    if x_before < xa:
        p1 = _find_tip_polygon(inst, inside, prot, top_tip, "bot", bci, f_before)
    if x_after < xa:
        p3 = _find_tip_polygon(inst, inside, prot, bot_tip, "top", aci, f_after)

    if x_before > xa and x_after > xa:
        return _case_c1(sc, inst, inside, xa, x_before, x_after, f_before,
                        f_after, mirrored)
    if (x_before > xa and p3) or (x_after > xa and p1) or (p1 and p3):
        return _case_c2(sc, inst, inside, xa, x_before, x_after, f_before,
                        f_after, top_tip, bot_tip, p1, p3, mirrored)
    return _case_c3(sc, inst, smap, seers, inside, prot, protected, anchor_ci,
                    xa, x_before, x_after, top_tip, bot_tip, mirrored)


def _case_c1(sc, inst, inside, xa, x_before, x_after, f_before, f_after,
             mirrored):
    for x in _cut_x_candidates(inst, inside, xa, [min(x_before, x_after)]):
        hi = _fence_point_at_x(f_before.chain, x, prefer_low=True)
        lo = _fence_point_at_x(f_after.chain, x, prefer_low=False)
        if hi is None or lo is None or hi[1] <= lo[1]:
            continue
        if any(polygon_interior_hits_segment(inst.polygons[pid], hi, lo)
               for pid in inside):
            continue
        try:
            return _build_step("C1", sc, inst, [_gamma_cut(hi, lo)], (hi, lo),
                               inside, mirrored)
        except (NoValidCut, ContainerInvalid):
            continue
    raise NoValidCut("no free vertical cut beside the anchor line")


def _case_c2(sc, inst, inside, xa, x_before, x_after, f_before, f_after,
             top_tip, bot_tip, p1, p3, mirrored):
    from .containers import subchain

    extra = [x for x in (x_before, x_after) if x > xa]
    for x in _cut_x_candidates(inst, inside, xa, extra):
        if p1 and p3:
            mu1 = p1[1].lower
            mu3 = p3[1].upper
            lo = _fence_point_at_x(mu1, x, prefer_low=False)
            hi = _fence_point_at_x(mu3, x, prefer_low=True)
            if lo is None or hi is None or hi[1] <= lo[1]:
                continue
            seg1 = subchain(mu1, top_tip, lo)
            seg3 = subchain(mu3, bot_tip, hi)
            if seg1 is None or seg3 is None:
                continue
            gamma = [_fence_piece(seg1, BOTTOM, p1[1].lower_sources),
                     _gamma_cut(lo, hi),
                     _fence_piece(tuple(reversed(seg3)), TOP, p3[1].upper_sources)]
            ell = (lo, hi)
        elif p3:
            mu3 = p3[1].upper
            lo = _fence_point_at_x(f_before.chain, x, prefer_low=False)
            hi = _fence_point_at_x(mu3, x, prefer_low=True)
            if lo is None or hi is None or hi[1] <= lo[1]:
                continue
            seg3 = subchain(mu3, bot_tip, hi)
            if seg3 is None:
                continue
            gamma = [_gamma_cut(lo, hi),
                     _fence_piece(tuple(reversed(seg3)), TOP, p3[1].upper_sources)]
            ell = (lo, hi)
        else:
            mu1 = p1[1].lower
            lo = _fence_point_at_x(mu1, x, prefer_low=False)
            hi = _fence_point_at_x(f_after.chain, x, prefer_low=True)
            if lo is None or hi is None or hi[1] <= lo[1]:
                continue
            seg1 = subchain(mu1, top_tip, lo)
            if seg1 is None:
                continue
            gamma = [_fence_piece(seg1, BOTTOM, p1[1].lower_sources),
                     _gamma_cut(lo, hi)]
            ell = (lo, hi)
        if any(polygon_interior_hits_segment(inst.polygons[pid], *ell)
               for pid in inside):
            continue
        try:
            return _build_step("C2", sc, inst, gamma, ell, inside, mirrored)
        except (NoValidCut, ContainerInvalid):
            continue
    raise NoValidCut("no cut beside a tip-loaded anchor line")


def _case_c3(sc, inst, smap, seers, inside, prot, protected, anchor_ci,
             xa, x_before, x_after, top_tip, bot_tip, mirrored):
    downward = x_after < xa or not (x_before < xa)
    tip = bot_tip if downward else top_tip
    k = sc.kappa
    pt, hits = _scan(sc, inst, protected, xa, tip[1], upward=not downward)
    if pt == tip:
        # the tip itself qualifies through its incident pieces: drop those
        # and rescan strictly past it
        filtered = []
        ci = fi = 0
        for piece in sc.container.pieces:
            tag = ("cut", ci) if piece.role == CUT else ("fence", fi)
            if piece.role == CUT:
                ci += 1
            else:
                fi += 1
            if tip in (piece.chain[0], piece.chain[-1]) or \
                    (piece.role == CUT and tip in piece.chain):
                filtered.append(tag)
        pt, hits = _scan(sc, inst, protected, xa, tip[1], upward=not downward,
                         exclude=tuple(filtered))
    kind = _hit_kinds(hits, anchor_ci, k)
    gamma_cut = _gamma_cut(tip, pt)
    if kind[0] in ("cut", "far", "adj"):
        return _build_step("C3", sc, inst, [gamma_cut], (tip, pt), inside,
                           mirrored)
    pid = kind[1]
    wr = _witness_for(prot, pid, RIGHT)
    if wr is not None:
        chain = wr.upper if downward else wr.lower
        delta = chain_suffix(chain, pt)
        if delta is not None:
            kindf = TOP if downward else BOTTOM
            srcs = wr.upper_sources if downward else wr.lower_sources
            gamma = [gamma_cut, _fence_piece(delta, kindf, srcs)]
            return _build_step("C3", sc, inst, gamma, (tip, pt), inside,
                               mirrored)
    wl = _witness_for(prot, pid, LEFT)
    if wl is not None:
        chain = wl.upper if downward else wl.lower
        delta = chain_prefix(chain, pt)
        if delta is not None:
            kindf = TOP if downward else BOTTOM
            srcs = wl.upper_sources if downward else wl.lower_sources
            gamma = [gamma_cut, _fence_piece(tuple(reversed(delta)), kindf, srcs)]
            return _build_step("C3", sc, inst, gamma, (tip, pt), inside,
                               mirrored)
    raise NoValidCut("tip scan hit an unprotectable polygon")


# ---------------------------------------------------------------------------
# Mirroring and the public entry point

MIRROR_MATRIX = ((-1, 0), (0, 1))


def _mirror_instance(inst: Instance) -> Instance:
    from .charging import NormalizeMap, _invert, transform_instance
    nm = NormalizeMap(matrix=MIRROR_MATRIX, inverse=_invert(MIRROR_MATRIX))
    return transform_instance(inst, nm)[0]


def _mirror_point(p: Point) -> Point:
    return (-p[0], p[1])


def _mirror_container(c: Container) -> Container:
    pieces = []
    for piece in reversed(c.pieces):
        rp = piece.reversed()
        pieces.append(replace(rp, chain=tuple(_mirror_point(q) for q in rp.chain)))
    for i, p in enumerate(pieces):
        if p.role == CUT:
            pieces = pieces[i:] + pieces[:i]
            break
    return Container(pieces=tuple(pieces))


def _mirror_step(step: PartitionStep) -> PartitionStep:
    return PartitionStep(
        case=step.case,
        gamma=tuple(replace(p.reversed(),
                            chain=tuple(_mirror_point(q)
                                        for q in p.reversed().chain))
                    for p in reversed(step.gamma)),
        ell=(_mirror_point(step.ell[1]), _mirror_point(step.ell[0])),
        child1=canonical_structured(_mirror_container(step.child1.container)),
        child2=canonical_structured(_mirror_container(step.child2.container)),
        lost=step.lost,
        mirrored=True,
    )


def invert_seen(smap) -> dict[int, list[int]]:
    seers: dict[int, list[int]] = {}
    for i, row in smap.items():
        for j in row:
            seers.setdefault(j, []).append(i)
    return {k: sorted(v) for k, v in seers.items()}


def partition_step(sc: StructuredContainer, inst: Instance,
                   smap=None, seers=None) -> PartitionStep:
    """One application of the partitioning construction, mirroring first when
    the right cutting lines outnumber the left ones."""
    if smap is None:
        smap = seen_map(inst, Option(1, TAIL))
    if seers is None:
        seers = invert_seen(smap)
    if sc.kappa_prime < math.ceil(sc.kappa / 2):
        minst = _mirror_instance(inst)
        msc = canonical_structured(_mirror_container(sc.container))
        msmap = seen_map(minst, Option(1, TAIL))
        step = _partition_step_raw(msc, minst, msmap, invert_seen(msmap),
                                   mirrored=True)
        return _mirror_step(step)
    return _partition_step_raw(sc, inst, smap, seers)
