"""Robust 2D primitives: convex hull, circumcircle tests, Delaunay triangulation.

Coordinates are pixel-scale doubles, so tolerance-banded floating predicates
are sufficient; no exact arithmetic is used. All functions are pure and the
returned structures are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .errors import (
    AllCollinear,
    DataError,
    DegenerateTriangle,
    InvariantViolation,
    TooFewPoints,
)
from .validation import as_xy, as_xy_list

# Absolute tolerance on signed triangle area, in squared pixels.
EPS_AREA = 1e-12
# Tolerance on the scale-normalized in-circle determinant.
EPS_INCIRCLE = 1e-10
# Euclidean radius for merging duplicate points.
EPS_DUP = 1e-9

INSIDE = "inside"
ON = "on"
OUTSIDE = "outside"

# Super-triangle distance multiplier (power of two keeps grid inputs exact).
_SUPER_SCALE = 2 ** 18


@dataclass(frozen=True)
class Point2D:
    """A finite 2D coordinate in pixels."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DataError(f"coordinates must be finite, got ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Triangle:
    """Vertex indices into an external point list, counter-clockwise."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if len({self.i, self.j, self.k}) != 3:
            raise DegenerateTriangle(f"triangle indices must be distinct: {self}")

    def indices(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


def orient2d(a, b, c) -> float:
    """Twice the signed area of (a, b, c); positive for a counter-clockwise turn."""
    ax, ay = as_xy(a)
    bx, by = as_xy(b)
    cx, cy = as_xy(c)
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def signed_area(a, b, c) -> float:
    return 0.5 * orient2d(a, b, c)


def _incircle_det(ax, ay, bx, by, cx, cy, dx, dy):
    """In-circle determinant and its magnitude scale.

    Positive when d lies inside the circumcircle of counter-clockwise (a, b, c).
    """
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    ad2 = adx * adx + ady * ady
    bd2 = bdx * bdx + bdy * bdy
    cd2 = cdx * cdx + cdy * cdy
    det = (
        ad2 * (bdx * cdy - cdx * bdy)
        + bd2 * (cdx * ady - adx * cdy)
        + cd2 * (adx * bdy - bdx * ady)
    )
    la, lb, lc = math.sqrt(ad2), math.sqrt(bd2), math.sqrt(cd2)
    scale = la * lb * lc * (la + lb + lc)
    return det, scale


def incircle_sign(a, b, c, d, eps: float = EPS_INCIRCLE) -> int:
    """Tri-state in-circle test for counter-clockwise (a, b, c).

    Returns +1 if d is strictly inside the circumcircle, -1 if strictly
    outside, 0 if within the tolerance band of the circle.
    """
    ax, ay = as_xy(a)
    bx, by = as_xy(b)
    cx, cy = as_xy(c)
    dx, dy = as_xy(d)
    det, scale = _incircle_det(ax, ay, bx, by, cx, cy, dx, dy)
    if scale == 0.0:
        return 0
    norm = det / scale
    if norm > eps:
        return 1
    if norm < -eps:
        return -1
    return 0


def circumcircle_contains(
    t: Triangle,
    p,
    points,
    eps_area: float = EPS_AREA,
    eps_incircle: float = EPS_INCIRCLE,
) -> str:
    """Classify p against the circumcircle of t: 'inside', 'on', or 'outside'."""
    pts = [as_xy(q) for q in points]
    a, b, c = pts[t.i], pts[t.j], pts[t.k]
    doubled = orient2d(a, b, c)
    if abs(doubled) / 2.0 < eps_area:
        raise DegenerateTriangle(
            f"triangle {t.indices()} has near-zero area {doubled / 2.0}"
        )
    if doubled < 0:
        a, c = c, a
    sign = incircle_sign(a, b, c, p, eps_incircle)
    return {1: INSIDE, 0: ON, -1: OUTSIDE}[sign]


def circumcircle(a, b, c) -> tuple[float, float, float]:
    """Circumcenter (x, y) and radius of a non-degenerate triangle."""
    ax, ay = as_xy(a)
    bx, by = as_xy(b)
    cx, cy = as_xy(c)
    d = 2.0 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    if d == 0.0:
        raise DegenerateTriangle("collinear points have no circumcircle")
    b2 = (bx - ax) ** 2 + (by - ay) ** 2
    c2 = (cx - ax) ** 2 + (cy - ay) ** 2
    ux = ax + ((cy - ay) * b2 - (by - ay) * c2) / d
    uy = ay + ((bx - ax) * c2 - (cx - ax) * b2) / d
    r = math.hypot(ux - ax, uy - ay)
    return ux, uy, r


def convex_hull(points) -> list[int]:
    """Indices of the convex hull, counter-clockwise, starting from the
    lexicographically smallest point. Collinear boundary points are excluded.
    """
    pts = as_xy_list(points)

    # Exact duplicates keep their first occurrence only.
    first: dict[tuple[float, float], int] = {}
    for idx, p in enumerate(pts):
        first.setdefault(p, idx)
    order = sorted(first.values(), key=lambda i: (pts[i][0], pts[i][1]))

    if len(order) == 1:
        return [order[0]]
    if len(order) == 2:
        return order

    def cross(o, a, b):
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) - (
            pts[a][1] - pts[o][1]
        ) * (pts[b][0] - pts[o][0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # Fully collinear input: the two extremes remain.
        return [lower[0], lower[-1]]
    return hull


def dedupe_points(points, eps_dup: float = EPS_DUP) -> list[tuple[float, float]]:
    """Merge points closer than eps_dup, keeping first occurrences in order."""
    pts = as_xy_list(points)
    kept: list[tuple[float, float]] = []
    eps2 = eps_dup * eps_dup
    for x, y in pts:
        dup = False
        for kx, ky in kept:
            ddx, ddy = x - kx, y - ky
            if ddx * ddx + ddy * ddy <= eps2:
                dup = True
                break
        if not dup:
            kept.append((x, y))
    return kept


@dataclass(frozen=True)
class Triangulation:
    """A Delaunay triangulation: deduplicated points, CCW triangles, hull."""

    points: tuple[Point2D, ...]
    triangles: tuple[Triangle, ...]
    hull: tuple[int, ...]

    def triangle_points(self, t: Triangle) -> tuple[Point2D, Point2D, Point2D]:
        return (self.points[t.i], self.points[t.j], self.points[t.k])

    def to_json_dict(self) -> dict:
        return {
            "points": [[p.x, p.y] for p in self.points],
            "triangles": [list(t.indices()) for t in self.triangles],
            "hull": list(self.hull),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Triangulation":
        points = tuple(Point2D(float(x), float(y)) for x, y in data["points"])
        triangles = tuple(Triangle(int(i), int(j), int(k)) for i, j, k in data["triangles"])
        return cls(points=points, triangles=triangles, hull=tuple(int(i) for i in data["hull"]))

    def validate(self, eps_incircle: float = EPS_INCIRCLE) -> None:
        """Check structural invariants; raises InvariantViolation on failure."""
        pts = [p.as_tuple() for p in self.points]
        n = len(pts)
        edge_count: dict[tuple[int, int], int] = {}
        for t in self.triangles:
            if not (0 <= t.i < n and 0 <= t.j < n and 0 <= t.k < n):
                raise InvariantViolation(f"triangle {t} references missing points")
            if orient2d(pts[t.i], pts[t.j], pts[t.k]) <= 0:
                raise InvariantViolation(f"triangle {t} is not counter-clockwise")
            for u, v in ((t.i, t.j), (t.j, t.k), (t.k, t.i)):
                key = (min(u, v), max(u, v))
                edge_count[key] = edge_count.get(key, 0) + 1
            for idx in range(n):
                if idx in t.indices():
                    continue
                if incircle_sign(pts[t.i], pts[t.j], pts[t.k], pts[idx], eps_incircle) > 0:
                    raise InvariantViolation(
                        f"point {idx} lies inside the circumcircle of {t.indices()}"
                    )
        hull_edges = {
            (min(u, v), max(u, v))
            for u, v in zip(self.hull, list(self.hull[1:]) + [self.hull[0]])
        }
        if len(self.hull) >= 3:
            for edge, count in edge_count.items():
                expected = 1 if edge in hull_edges else 2
                if count != expected:
                    raise InvariantViolation(
                        f"edge {edge} is shared by {count} triangles, expected {expected}"
                    )


def _contains_point(pts, tri, x, y, tol) -> bool:
    a, b, c = (pts[tri[0]], pts[tri[1]], pts[tri[2]])
    for (px, py), (qx, qy) in ((a, b), (b, c), (c, a)):
        if (qx - px) * (y - py) - (qy - py) * (x - px) < -tol:
            return False
    return True


def _is_bad(pts, tri, x, y, eps_incircle, contain_tol) -> bool:
    a, b, c = pts[tri[0]], pts[tri[1]], pts[tri[2]]
    det, scale = _incircle_det(a[0], a[1], b[0], b[1], c[0], c[1], x, y)
    if scale > 0.0 and det / scale > eps_incircle:
        return True
    return _contains_point(pts, tri, x, y, contain_tol)


def _ccw(pts, i, j, k) -> tuple[int, int, int]:
    if orient2d(pts[i], pts[j], pts[k]) < 0:
        return (i, k, j)
    return (i, j, k)


def _canonical_triangle(tri) -> tuple[int, int, int]:
    m = min(tri)
    while tri[0] != m:
        tri = (tri[1], tri[2], tri[0])
    return tri


def _cocircular_canonical_flips(pts, tris, eps_incircle):
    """Rewrite diagonals of cocircular quads so the diagonal containing the
    lowest point index wins. Delaunay-neutral by construction."""
    tris = list(tris)
    guard = 0
    max_rounds = 20 * (len(tris) + 1) ** 2
    changed = True
    while changed:
        changed = False
        guard += 1
        if guard > max_rounds:
            raise InvariantViolation("cocircular canonicalization did not terminate")
        edge_map: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for t_idx, (i, j, k) in enumerate(tris):
            for u, v, w in ((i, j, k), (j, k, i), (k, i, j)):
                edge_map.setdefault((min(u, v), max(u, v)), []).append((t_idx, w))
        for edge in sorted(edge_map):
            entries = edge_map[edge]
            if len(entries) != 2:
                continue
            (t1, w), (t2, x) = entries
            u, v = edge
            if min(w, x) >= min(u, v):
                continue
            a, b, c = pts[u], pts[w], pts[v]
            if orient2d(a, b, c) < 0:
                a, c = c, a
            if incircle_sign(a, b, c, pts[x], eps_incircle) != 0:
                continue
            o1 = orient2d(pts[w], pts[x], pts[u])
            o2 = orient2d(pts[w], pts[x], pts[v])
            if not ((o1 > 0 > o2) or (o1 < 0 < o2)):
                continue
            tris[t1] = _ccw(pts, w, x, u)
            tris[t2] = _ccw(pts, w, x, v)
            changed = True
            break
    return tris


def delaunay(
    points,
    eps_dup: float = EPS_DUP,
    eps_incircle: float = EPS_INCIRCLE,
    eps_area: float = EPS_AREA,
) -> Triangulation:
    """Delaunay triangulation via incremental insertion with a bounding
    super-triangle. Duplicate points are merged silently; output is
    deterministic for identical input.
    """
    raw = as_xy_list(points)
    pts = dedupe_points(raw, eps_dup)
    z = len(pts)
    if z < 3:
        raise TooFewPoints(f"need at least 3 distinct points, got {z}")

    # Collinearity test against the most distant pair from the first point.
    x0, y0 = pts[0]
    far = max(range(1, z), key=lambda i: (pts[i][0] - x0) ** 2 + (pts[i][1] - y0) ** 2)
    if all(abs(orient2d(pts[0], pts[far], p)) <= 2.0 * eps_area for p in pts):
        raise AllCollinear("all points are collinear within tolerance")

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cx = round((min(xs) + max(xs)) / 2.0)
    cy = round((min(ys) + max(ys)) / 2.0)
    extent = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    d = float(_SUPER_SCALE) * extent
    coords = list(pts) + [
        (round(cx - 3 * d), round(cy - 2 * d - 1)),
        (round(cx + 3 * d + 7), round(cy - 2 * d + 3)),
        (round(cx + 5), round(cy + 3 * d)),
    ]
    s0, s1, s2 = z, z + 1, z + 2
    tris: list[tuple[int, int, int]] = [_ccw(coords, s0, s1, s2)]
    # Exact containment: a point on a shared edge belongs to both triangles,
    # and both are then bad via the strict chord-interior circumcircle rule.
    contain_tol = 0.0

    for p_idx in range(z):
        x, y = coords[p_idx]
        bad = [
            t_idx
            for t_idx, tri in enumerate(tris)
            if _is_bad(coords, tri, x, y, eps_incircle, contain_tol)
        ]
        if not bad:
            raise InvariantViolation(f"no cavity found inserting point {p_idx}")

        # Keep only the cavity component connected to a triangle containing p.
        seed = next(
            (t for t in bad if _contains_point(coords, tris[t], x, y, contain_tol)),
            bad[0],
        )
        bad_set = set(bad)
        edge_owner: dict[tuple[int, int], list[int]] = {}
        for t_idx in bad:
            i, j, k = tris[t_idx]
            for u, v in ((i, j), (j, k), (k, i)):
                edge_owner.setdefault((min(u, v), max(u, v)), []).append(t_idx)
        component = {seed}
        stack = [seed]
        while stack:
            cur = stack.pop()
            i, j, k = tris[cur]
            for u, v in ((i, j), (j, k), (k, i)):
                for other in edge_owner[(min(u, v), max(u, v))]:
                    if other in bad_set and other not in component:
                        component.add(other)
                        stack.append(other)

        directed = set()
        for t_idx in component:
            i, j, k = tris[t_idx]
            directed.update(((i, j), (j, k), (k, i)))
        boundary = [(u, v) for (u, v) in directed if (v, u) not in directed]

        tris = [t for idx, t in enumerate(tris) if idx not in component]
        for u, v in boundary:
            tris.append(_ccw(coords, u, v, p_idx))

    real = [t for t in tris if max(t) < z]
    real = _cocircular_canonical_flips(coords, real, eps_incircle)
    real = sorted(_canonical_triangle(t) for t in real)

    hull = convex_hull(pts)
    return Triangulation(
        points=tuple(Point2D(x, y) for x, y in pts),
        triangles=tuple(Triangle(*t) for t in real),
        hull=tuple(hull),
    )
