"""Polygon primitives, convex decomposition and exact-geometry oracles.

Pieces are kept in a local frame whose origin is the reference vertex; every
placed coordinate is obtained with :func:`transform_vertex`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

COLLINEAR_TOL = 1e-9
DEGENERATE_TOL = 1e-12


class GeometryError(ValueError):
    pass


class SelfIntersecting(GeometryError):
    pass


class Degenerate(GeometryError):
    pass


class Point(NamedTuple):
    x: float
    y: float


class Placement(NamedTuple):
    tx: float
    ty: float
    theta: float


@dataclass(frozen=True)
class ConvexPart:
    vertices: tuple[Point, ...]
    part_index: int = 0

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def placed(self, pl: Placement) -> list[Point]:
        return [transform_vertex(v, pl) for v in self.vertices]


@dataclass(frozen=True)
class Piece:
    id: str
    outline: tuple[Point, ...]
    parts: tuple[ConvexPart, ...]
    reference: Point = Point(0.0, 0.0)

    @property
    def area(self) -> float:
        return signed_area(self.outline)

    @property
    def vertex_count(self) -> int:
        return sum(len(p.vertices) for p in self.parts)

    def bbox(self, theta: float = 0.0) -> tuple[float, float, float, float]:
        return bbox(rotate_points(self.outline, theta))


# --- small vector helpers -------------------------------------------------

def cross(o: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def signed_area(pts: Sequence[Sequence[float]]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def diameter(pts: Sequence[Sequence[float]]) -> float:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return math.hypot(max(xs) - min(xs), max(ys) - min(ys))


def bbox(pts: Sequence[Sequence[float]]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


def cos_sin(theta: float) -> tuple[float, float]:
    """cos/sin that are exact at multiples of a quarter turn."""
    k = theta / (0.5 * math.pi)
    kr = round(k)
    if abs(k - kr) < 1e-15 * max(1.0, abs(k)):
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[int(kr) % 4]
    return math.cos(theta), math.sin(theta)


def transform_vertex(v: Sequence[float], pl: Placement) -> Point:
    """Rotate ``v`` counterclockwise by ``pl.theta`` about the origin, then translate."""
    c, s = cos_sin(pl.theta)
    return Point(v[0] * c - v[1] * s + pl.tx, v[0] * s + v[1] * c + pl.ty)


def rotate_points(pts: Sequence[Sequence[float]], theta: float) -> list[Point]:
    pl = Placement(0.0, 0.0, theta)
    return [transform_vertex(p, pl) for p in pts]


# --- validation -----------------------------------------------------------

def _segments_intersect(p1, p2, p3, p4, eps: float) -> bool:
    d1 = cross(p3, p4, p1)
    d2 = cross(p3, p4, p2)
    d3 = cross(p1, p2, p3)
    d4 = cross(p1, p2, p4)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True

    def on_seg(a, b, p, d):
        return (
            abs(d) <= eps
            and min(a[0], b[0]) - 1e-15 <= p[0] <= max(a[0], b[0]) + 1e-15
            and min(a[1], b[1]) - 1e-15 <= p[1] <= max(a[1], b[1]) + 1e-15
        )

    return (
        on_seg(p3, p4, p1, d1)
        or on_seg(p3, p4, p2, d2)
        or on_seg(p1, p2, p3, d3)
        or on_seg(p1, p2, p4, d4)
    )


def is_simple(pts: Sequence[Sequence[float]]) -> bool:
    n = len(pts)
    scale = diameter(pts) or 1.0
    eps = DEGENERATE_TOL * scale * scale
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            c, d = pts[j], pts[(j + 1) % n]
            if _segments_intersect(a, b, c, d, eps):
                return False
    # adjacent edges folding back onto each other
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if abs(cross(a, b, c)) <= eps:
            dot = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1])
            if dot < 0:
                return False
    return True


def _clean(pts: Sequence[Sequence[float]]) -> list[Point]:
    out: list[Point] = []
    scale = diameter(pts) if len(pts) > 1 else 1.0
    for p in pts:
        q = Point(float(p[0]), float(p[1]))
        if not (math.isfinite(q.x) and math.isfinite(q.y)):
            raise GeometryError(f"non-finite vertex {p!r}")
        if out and math.dist(out[-1], q) <= DEGENERATE_TOL * scale:
            continue
        out.append(q)
    while len(out) > 1 and math.dist(out[0], out[-1]) <= DEGENERATE_TOL * scale:
        out.pop()
    return out


def _check_polygon(pts: list[Point]) -> None:
    if len(pts) < 3:
        raise Degenerate("polygon needs at least 3 distinct vertices")
    d = diameter(pts)
    flat = all(abs(cross(pts[0], pts[1], p)) <= DEGENERATE_TOL * d * d for p in pts[2:])
    if flat:
        raise Degenerate("all vertices are collinear")
    if not is_simple(pts):
        raise SelfIntersecting("polygon edges cross")
    if abs(signed_area(pts)) <= DEGENERATE_TOL * d * d:
        raise Degenerate("polygon area is (numerically) zero")


def is_convex(pts: Sequence[Sequence[float]], tol: float = COLLINEAR_TOL) -> bool:
    """True for a counterclockwise polygon without reflex vertices (collinear allowed)."""
    d = diameter(pts)
    lim = -tol * d * d
    n = len(pts)
    for i in range(n):
        if cross(pts[i - 1], pts[i], pts[(i + 1) % n]) < lim:
            return False
    return signed_area(pts) > 0


# --- decomposition --------------------------------------------------------

def _point_in_triangle(p, a, b, c, eps: float) -> bool:
    return cross(a, b, p) >= -eps and cross(b, c, p) >= -eps and cross(c, a, p) >= -eps


def _triangulate(pts: list[Point]) -> list[tuple[int, int, int]]:
    n = len(pts)
    d = diameter(pts)
    eps = COLLINEAR_TOL * d * d
    idx = list(range(n))
    tris: list[tuple[int, int, int]] = []
    while len(idx) > 3:
        m = len(idx)
        ear = None
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if cross(a, b, c) <= eps:
                continue
            blocked = False
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = pts[j]
                if p == a or p == b or p == c:
                    continue
                if _point_in_triangle(p, a, b, c, eps):
                    blocked = True
                    break
            if not blocked:
                ear = k
                break
        if ear is None:
            # only degenerate (collinear) tips remain; drop one without a triangle
            for k in range(m):
                if abs(cross(pts[idx[k - 1]], pts[idx[k]], pts[idx[(k + 1) % m]])) <= eps:
                    ear = k
                    break
            if ear is None:
                raise SelfIntersecting("ear clipping failed; polygon is not simple")
            del idx[ear]
            continue
        tris.append((idx[ear - 1], idx[ear], idx[(ear + 1) % m]))
        del idx[ear]
    if abs(cross(pts[idx[0]], pts[idx[1]], pts[idx[2]])) > eps:
        tris.append((idx[0], idx[1], idx[2]))
    return tris


def _merge(a: list[int], b: list[int], u: int, v: int) -> list[int]:
    # a holds edge u->v, b holds v->u
    ia = a.index(v)
    a_rot = a[ia:] + a[:ia]  # v ... u
    ib = b.index(u)
    b_rot = b[ib:] + b[:ib]  # u ... v
    return a_rot + b_rot[1:-1]


def decompose(outline: Sequence[Sequence[float]]) -> list[ConvexPart]:
    """Split a simple counterclockwise polygon into interior-disjoint convex parts.

    Ear-clipping triangulation, then greedy removal of diagonals whose removal
    keeps the merged polygon convex.  Convex input comes back as one part.
    """
    pts = _clean(outline)
    _check_polygon(pts)
    if signed_area(pts) < 0:
        pts = pts[::-1]
    if is_convex(pts):
        return [ConvexPart(tuple(pts), 0)]

    polys: list[Optional[list[int]]] = [list(t) for t in _triangulate(pts)]
    d = diameter(pts)
    changed = True
    while changed:
        changed = False
        edge_owner: dict[tuple[int, int], int] = {}
        for pi, poly in enumerate(polys):
            if poly is None:
                continue
            for k in range(len(poly)):
                edge_owner[(poly[k], poly[(k + 1) % len(poly)])] = pi
        for (u, v), pa in sorted(edge_owner.items()):
            pb = edge_owner.get((v, u))
            if pb is None or pb == pa or polys[pa] is None or polys[pb] is None:
                continue
            merged = _merge(polys[pa], polys[pb], u, v)
            if len(set(merged)) == len(merged) and is_convex([pts[i] for i in merged]):
                polys[pa] = merged
                polys[pb] = None
                changed = True
                break
    out = []
    for poly in polys:
        if poly is None:
            continue
        verts = [pts[i] for i in poly]
        if abs(signed_area(verts)) <= DEGENERATE_TOL * d * d:
            continue
        out.append(ConvexPart(tuple(verts), len(out)))
    return out


def _as_convex_part(pts: Sequence[Sequence[float]], index: int) -> ConvexPart:
    verts = _clean(pts)
    _check_polygon(verts)
    if signed_area(verts) < 0:
        verts = verts[::-1]
    if not is_convex(verts):
        raise GeometryError(f"supplied part {index} is not convex")
    return ConvexPart(tuple(verts), index)


def normalize_piece(
    outline: Sequence[Sequence[float]],
    id: str = "",
    parts: Optional[Sequence[Sequence[Sequence[float]]]] = None,
) -> Piece:
    """Build a :class:`Piece` whose reference vertex sits at the local origin.

    The reference is the outline vertex closest to the origin of the input
    coordinates (lowest index on ties).  ``parts`` may carry a precomputed
    convex decomposition in the same input frame; it is validated against the
    outline instead of being recomputed.
    """
    pts = _clean(outline)
    _check_polygon(pts)
    dists = [math.hypot(p.x, p.y) for p in pts]
    ref_idx = min(range(len(pts)), key=lambda i: (dists[i], i))
    ref = pts[ref_idx]
    if signed_area(pts) < 0:
        order = [ref_idx] + [(ref_idx - k) % len(pts) for k in range(1, len(pts))]
    else:
        order = [(ref_idx + k) % len(pts) for k in range(len(pts))]
    local = tuple(Point(pts[i].x - ref.x, pts[i].y - ref.y) for i in order)

    if parts:
        shifted = [[(p[0] - ref.x, p[1] - ref.y) for p in part] for part in parts]
        cps = tuple(_as_convex_part(s, j) for j, s in enumerate(shifted))
        total = sum(c.area for c in cps)
        area = signed_area(local)
        if abs(total - area) > 1e-9 * area:
            raise GeometryError(
                f"piece {id!r}: part areas sum to {total}, outline area is {area}"
            )
        for a in range(len(cps)):
            for b in range(a + 1, len(cps)):
                if overlap_area(cps[a].vertices, cps[b].vertices) > 1e-9 * area:
                    raise GeometryError(f"piece {id!r}: parts {a} and {b} overlap")
    else:
        cps = tuple(decompose(local))
    return Piece(id=id, outline=local, parts=cps, reference=Point(0.0, 0.0))


# --- exact oracles --------------------------------------------------------

def _clip(subject: list[tuple[float, float]], a, b) -> list[tuple[float, float]]:
    # keep the part of subject left of a->b
    out = []
    n = len(subject)
    for i in range(n):
        p, q = subject[i], subject[(i + 1) % n]
        cp, cq = cross(a, b, p), cross(a, b, q)
        if cp >= 0:
            out.append(p)
        if (cp >= 0) != (cq >= 0):
            t = cp / (cp - cq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def overlap_area(a: Sequence[Sequence[float]], b: Sequence[Sequence[float]]) -> float:
    """Area of the intersection of two convex counterclockwise polygons."""
    poly = [tuple(p) for p in a]
    n = len(b)
    for i in range(n):
        if len(poly) < 3:
            return 0.0
        poly = _clip(poly, b[i], b[(i + 1) % n])
    if len(poly) < 3:
        return 0.0
    return max(0.0, signed_area(poly))


def _edge_normals(pts: Sequence[Sequence[float]]):
    n = len(pts)
    for i in range(n):
        ex = pts[(i + 1) % n][0] - pts[i][0]
        ey = pts[(i + 1) % n][1] - pts[i][1]
        L = math.hypot(ex, ey)
        if L > 0:
            yield (ey / L, -ex / L)


def separating_axis(
    a: Sequence[Sequence[float]], b: Sequence[Sequence[float]], tol: float = 1e-9
) -> Optional[tuple[Point, float]]:
    """Find a line with ``a`` on its left and ``b`` on its right.

    Returns ``(anchor, angle)`` where ``angle`` is the direction of the line,
    or ``None`` when the interiors overlap by more than ``tol`` (relative to
    the joint diameter).  The candidate normals are the edge normals of both
    polygons; the one with the widest gap wins and the line runs through the
    middle of that gap.
    """
    scale = diameter(list(a) + list(b)) or 1.0
    best = None
    for nx, ny in list(_edge_normals(a)) + list(_edge_normals(b)):
        pa = [nx * p[0] + ny * p[1] for p in a]
        pb = [nx * p[0] + ny * p[1] for p in b]
        gap = min(pb) - max(pa)
        gap2 = min(pa) - max(pb)
        if gap2 > gap:
            gap, nx, ny = gap2, -nx, -ny
            pa, pb = [-v for v in pa], [-v for v in pb]
        if best is None or gap > best[0]:
            best = (gap, nx, ny, 0.5 * (max(pa) + min(pb)))
    gap, nx, ny, mid = best
    if gap < -tol * scale:
        return None
    # direction with the left normal equal to -n, so that a lies on the left
    dx, dy = -ny, nx
    t0 = min(dx * p[0] + dy * p[1] for p in list(a) + list(b))
    anchor = Point(mid * nx + t0 * dx, mid * ny + t0 * dy)
    return anchor, math.atan2(dy, dx)


def side_residual(p: Sequence[float], anchor: Sequence[float], angle: float) -> float:
    """Signed distance of ``p`` to the directed line; positive on the left."""
    c, s = cos_sin(angle)
    return (p[1] - anchor[1]) * c - (p[0] - anchor[0]) * s
