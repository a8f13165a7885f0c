"""Instance model and the line-oriented `.dop` text format.

Format ('#' starts a comment, blank lines ignored):

    dops 1
    d <d>
    dir <x> <y>          # d lines, first must be "0 1"
    n <n>
    poly <p_1> ... <p_2d>   # n lines, rationals as "num/den" or integers
    bbox <p_1> <p_2> <p_3> <p_4>   # optional parallelogram supports

Polygon ids are the 0-based order of the poly lines.  Round-tripping is
bit-exact: rationals are kept in lowest terms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyInterior, GenerationFailed, ParseError
from .geometry import dot
from .polygon import DirectionSystem, Polygon, intersects, make_polygon, tighten

DEFAULT_PRIMARIES = {
    2: [(0, 1), (-1, 0)],
    3: [(0, 1), (-1, 1), (-1, -1)],
    4: [(0, 1), (-2, 1), (-1, 0), (-1, -1)],
    5: [(0, 1), (-3, 2), (-1, 0), (-2, -1), (-1, -2)],
}


@dataclass(frozen=True)
class Instance:
    ds: DirectionSystem
    polygons: tuple[Polygon, ...]
    bbox: Polygon

    @property
    def n(self) -> int:
        return len(self.polygons)


def default_bbox(ds: DirectionSystem, polygons) -> Polygon:
    """Parallelogram in directions v_1 and v_2 around all polygons, inflated
    by one unit step per side so every closure sits strictly inside."""
    idx = [1, 2, ds.d + 1, ds.d + 2]
    raw = {}
    for i in idx:
        w = ds.normal(i)
        raw[i] = max(dot(v, w) for p in polygons for v in p.vertices) + 1
    return tighten(ds, raw, line_levels={i: 1 for i in idx})


def make_instance(ds: DirectionSystem, polygons, bbox: Polygon | None = None) -> Instance:
    polys = tuple(polygons)
    if bbox is None:
        bbox = default_bbox(ds, polys)
    for k, p in enumerate(polys):
        for i in range(1, 2 * ds.d + 1):
            if p.support(i) >= bbox.support(i):
                raise EmptyInterior(
                    f"polygon {k} is not strictly inside the bounding box")
    return Instance(ds=ds, polygons=polys, bbox=bbox)


def conflict_graph(inst: Instance) -> dict[int, set[int]]:
    """Exact pairwise interior-intersection adjacency over polygon ids."""
    adj: dict[int, set[int]] = {i: set() for i in range(inst.n)}
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            if intersects(inst.polygons[i], inst.polygons[j]):
                adj[i].add(j)
                adj[j].add(i)
    return adj


# ---------------------------------------------------------------------------
# Parsing / serialization


def _frac(tok: str, lineno: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", lineno)


def parse(text: str) -> Instance:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body.split()))
    if not rows:
        raise ParseError("empty input")

    pos = 0

    def take(keyword: str, count: int | None = None):
        nonlocal pos
        if pos >= len(rows):
            raise ParseError(f"unexpected end of file, wanted {keyword!r}")
        lineno, toks = rows[pos]
        if toks[0] != keyword:
            raise ParseError(f"expected {keyword!r}, got {toks[0]!r}", lineno)
        if count is not None and len(toks) != count + 1:
            raise ParseError(f"{keyword!r} wants {count} fields", lineno)
        pos += 1
        return lineno, toks[1:]

    lineno, ver = take("dops", 1)
    if ver[0] != "1":
        raise ParseError(f"unsupported format version {ver[0]}", lineno)
    lineno, dd = take("d", 1)
    d = int(dd[0])
    prim = []
    for _ in range(d):
        lineno, xy = take("dir", 2)
        prim.append((int(xy[0]), int(xy[1])))
    ds = DirectionSystem.make(prim)
    lineno, nn = take("n", 1)
    n = int(nn[0])
    polys = []
    for _ in range(n):
        lineno, vals = take("poly", 2 * d)
        supports = [_frac(t, lineno) for t in vals]
        levels = {i: 1 for i in range(1, 2 * d + 1)}
        polys.append(make_polygon(ds, supports, line_levels=levels))
    bbox = None
    if pos < len(rows) and rows[pos][1][0] == "bbox":
        lineno, vals = take("bbox", 4)
        raw = {}
        for i, tok in zip([1, 2, d + 1, d + 2], vals):
            raw[i] = _frac(tok, lineno)
        bbox = tighten(ds, raw, line_levels={i: 1 for i in raw})
    if pos < len(rows):
        raise ParseError("trailing content", rows[pos][0])
    return make_instance(ds, polys, bbox)


def serialize(inst: Instance) -> str:
    ds = inst.ds
    out = ["dops 1", f"d {ds.d}"]
    for i in range(1, ds.d + 1):
        v = ds.vec(i)
        out.append(f"dir {v[0]} {v[1]}")
    out.append(f"n {inst.n}")
    for p in inst.polygons:
        out.append("poly " + " ".join(str(s) for s in p.supports))
    bb = inst.bbox
    vals = [bb.support(1), bb.support(2), bb.support(ds.d + 1), bb.support(ds.d + 2)]
    out.append("bbox " + " ".join(str(v) for v in vals))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Random generation


def generate(d: int, n: int, seed: int, coord_range: int = 40,
             independent: bool = True, max_tries: int = 4000) -> Instance:
    """Deterministic random instance: integer supports sampled around random
    centers, tightened, rejection-sampled for pairwise independence when
    requested."""
    if d not in DEFAULT_PRIMARIES:
        raise GenerationFailed(f"no default direction set for d={d}")
    ds = DirectionSystem.make(DEFAULT_PRIMARIES[d])
    rng = random.Random(seed * 1000003 + d * 101 + n)
    polys: list[Polygon] = []
    tries = 0
    while len(polys) < n:
        tries += 1
        if tries > max_tries:
            raise GenerationFailed(
                f"could not place {n} polygons in {max_tries} attempts")
        cx = rng.randint(0, coord_range)
        cy = rng.randint(0, coord_range)
        raw = {}
        for i in range(1, 2 * d + 1):
            w = ds.normal(i)
            raw[i] = Fraction(cx * w[0] + cy * w[1] + rng.randint(1, 5))
        try:
            cand = tighten(ds, raw, line_levels={i: 1 for i in raw})
        except EmptyInterior:
            continue
        if independent and any(intersects(cand, p) for p in polys):
            continue
        polys.append(cand)
    return make_instance(ds, polys)
