"""Brute-force oracles for tests and acceptance.

Everything here is deliberately independent of the production code paths it
cross-checks: intersection via separating directions on vertex sets, MIS via
subset enumeration, guillotine optimum via direct recursion on rectangles.
Not built for performance.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import TooLarge
from .geometry import dot, orient, segment_intersection
from .instance import Instance, conflict_graph
from .polygon import Polygon


def intersect_oracle(p: Polygon, q: Polygon) -> bool:
    """Interior intersection via separating-direction search over the 2d
    candidate normals applied to vertex sets."""
    d = p.ds.d
    for i in range(1, d + 1):
        w = p.ds.normal(i)
        if max(dot(v, w) for v in p.vertices) <= min(dot(v, w) for v in q.vertices):
            return False
        if max(dot(v, w) for v in q.vertices) <= min(dot(v, w) for v in p.vertices):
            return False
    return True


def boundary_overlap_oracle(p: Polygon, q: Polygon) -> bool:
    """Whether the boundaries share at least one point, via exhaustive
    segment-pair intersection."""
    d = p.ds.d
    for i in range(1, 2 * d + 1):
        a = p.edge(i)
        for j in range(1, 2 * d + 1):
            b = q.edge(j)
            if segment_intersection(a.tail, a.head, b.tail, b.head) is not None:
                return True
    return False


def hull_matches_edges(p: Polygon) -> bool:
    """Tightened edge chain, with degenerate edges collapsed, must equal the
    convex hull boundary of the vertex set."""
    from .geometry import convex_hull, dedup_consecutive

    chain = []
    for i in range(1, 2 * p.ds.d + 1):
        e = p.edge(i)
        chain.append(e.tail)
        chain.append(e.head)
    chain = list(dedup_consecutive(chain))
    if chain and chain[0] == chain[-1]:
        chain.pop()
    hull = convex_hull(p.vertices)
    if len(chain) != len(hull):
        return False
    if not hull:
        return True
    k = chain.index(hull[0])
    return chain[k:] + chain[:k] == hull


def mis_enumerate(inst: Instance) -> int:
    """Maximum independent set size by full subset scan (n <= 16)."""
    n = inst.n
    if n > 16:
        raise TooLarge(f"subset enumeration capped at 16, got {n}")
    adj = conflict_graph(inst)
    masks = [0] * n
    for i in range(n):
        for j in adj[i]:
            masks[i] |= 1 << j
    best = 0
    for s in range(1 << n):
        ok = True
        for i in range(n):
            if s >> i & 1 and masks[i] & s:
                ok = False
                break
        if ok:
            best = max(best, bin(s).count("1"))
    return best


def guillotine_opt(rects, width: int, height: int) -> int:
    """Optimal recursive axis-aligned guillotine partition value for integer
    rectangles (x1, y1, x2, y2) inside [0, width] x [0, height].

    A cut at an integer coordinate splits the cell; rectangles crossed by the
    cut are discarded.  Base value of a nonempty cell is 1 (keep any single
    rectangle and stop)."""
    if len(rects) > 12:
        raise TooLarge("guillotine oracle capped at 12 rectangles")
    rects = tuple(sorted(rects))

    @lru_cache(maxsize=None)
    def solve(x1, y1, x2, y2):
        inside = [r for r in rects
                  if x1 <= r[0] and r[2] <= x2 and y1 <= r[1] and r[3] <= y2]
        if not inside:
            return 0
        best = 1
        for c in range(x1 + 1, x2):
            best = max(best, solve(x1, y1, c, y2) + solve(c, y1, x2, y2))
        for c in range(y1 + 1, y2):
            best = max(best, solve(x1, y1, x2, c) + solve(x1, c, x2, y2))
        return best

    return solve(0, 0, width, height)


def crossing_oracle(a, b) -> bool:
    """Literal subcurve enumeration of the crossing predicate: chains contain
    aligned subcurves w, q with equal middles, distinct ends, and the two end
    triangles equally oriented (non-collinear).  Exponential in spirit, fine
    for the micro chains used in tests."""
    from .geometry import _refine_chains, dedup_consecutive

    a = dedup_consecutive(a)
    b = dedup_consecutive(b)
    if len(a) < 2 or len(b) < 2:
        return False
    ra, rb = _refine_chains(a, b)
    for bb in (rb, tuple(reversed(rb))):
        for i in range(len(ra)):
            for j in range(len(bb)):
                # subcurves ra[i .. i+k], bb[j .. j+k]
                for k in range(2, min(len(ra) - i, len(bb) - j)):
                    w0, wk = ra[i], ra[i + k]
                    q0, qk = bb[j], bb[j + k]
                    if w0 == q0 or wk == qk:
                        continue
                    if any(ra[i + m] != bb[j + m] for m in range(1, k)):
                        continue
                    t1 = orient(w0, q0, ra[i + 2])
                    t2 = orient(wk, qk, ra[i + k - 2])
                    if t1 != 0 and t2 != 0 and (t1 > 0) == (t2 > 0):
                        return True
    return False
