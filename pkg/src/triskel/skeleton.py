"""Skeletonization stack: thinning, boundary tracing, polygon simplification
by discrete curve evolution, branch pruning, and endpoint/junction detection.

Pixel coordinates are (x, y) = (column, row). Polygons follow the
positive-shoelace orientation in these coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
import heapq
import logging
import math

import numpy as np
from scipy import ndimage

from .errors import DegenerateShape, EmptyMask, TargetTooSmall
from .geometry import EPS_DUP, Point2D
from .raster import BinaryRaster

logger = logging.getLogger(__name__)

_EIGHT = np.ones((3, 3), dtype=int)
# 8-neighborhood offsets (dr, dc) in the classic clockwise thinning order
# N, NE, E, SE, S, SW, W, NW.
_RING = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]


@dataclass(frozen=True)
class Polygon:
    """Closed polygon; the last vertex connects back to the first."""

    vertices: tuple[Point2D, ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DegenerateShape(
                f"polygon needs at least 3 vertices, got {len(self.vertices)}"
            )
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            if math.hypot(a.x - b.x, a.y - b.y) <= EPS_DUP:
                raise DegenerateShape(f"consecutive duplicate vertices at {i}")

    def __len__(self) -> int:
        return len(self.vertices)

    def signed_area(self) -> float:
        total = 0.0
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            total += a.x * b.y - b.x * a.y
        return 0.5 * total

    def xy(self) -> np.ndarray:
        return np.array([(v.x, v.y) for v in self.vertices])


@dataclass(frozen=True)
class SkeletonPoints:
    """Detected skeleton endpoints and merged junction points."""

    endpoints: tuple[Point2D, ...]
    junctions: tuple[Point2D, ...]

    def all_points(self) -> list[Point2D]:
        return list(self.endpoints) + list(self.junctions)


def _neighbor_stack(img: np.ndarray) -> list[np.ndarray]:
    """The eight neighbor planes of a padded image, in _RING order."""
    p = np.pad(img, 1)
    planes = []
    for dr, dc in _RING:
        planes.append(p[1 + dr : p.shape[0] - 1 + dr, 1 + dc : p.shape[1] - 1 + dc])
    return planes

def _deletion_mask(img: np.ndarray, subpass: int) -> np.ndarray:
    """Guo-Hall deletion candidates for one parallel sub-pass.

    Erodes ribbon ends by at most one pixel, unlike the plain Zhang-Suen
    conditions which eat half the ribbon width off each free end.
    """
    p2, p3, p4, p5, p6, p7, p8, p9 = _neighbor_stack(img)
    c_num = (
        ((~p2) & (p3 | p4)).astype(np.int8)
        + ((~p4) & (p5 | p6)).astype(np.int8)
        + ((~p6) & (p7 | p8)).astype(np.int8)
        + ((~p8) & (p9 | p2)).astype(np.int8)
    )
    n1 = (
        (p9 | p2).astype(np.int8)
        + (p3 | p4).astype(np.int8)
        + (p5 | p6).astype(np.int8)
        + (p7 | p8).astype(np.int8)
    )
    n2 = (
        (p2 | p3).astype(np.int8)
        + (p4 | p5).astype(np.int8)
        + (p6 | p7).astype(np.int8)
        + (p8 | p9).astype(np.int8)
    )
    n_min = np.minimum(n1, n2)
    if subpass == 0:
        m = (p6 | p7 | ~p9) & p8
    else:
        m = (p2 | p3 | ~p5) & p4
    return img & (c_num == 1) & (n_min >= 2) & (n_min <= 3) & ~m


def _deletable_single(img: np.ndarray, r: int, c: int, subpass: int) -> bool:
    h, w = img.shape
    ring = []
    for dr, dc in _RING:
        rr, cc = r + dr, c + dc
        ring.append(bool(img[rr, cc]) if 0 <= rr < h and 0 <= cc < w else False)
    p2, p3, p4, p5, p6, p7, p8, p9 = ring
    c_num = (
        int((not p2) and (p3 or p4))
        + int((not p4) and (p5 or p6))
        + int((not p6) and (p7 or p8))
        + int((not p8) and (p9 or p2))
    )
    if c_num != 1:
        return False
    n1 = int(p9 or p2) + int(p3 or p4) + int(p5 or p6) + int(p7 or p8)
    n2 = int(p2 or p3) + int(p4 or p5) + int(p6 or p7) + int(p8 or p9)
    n_min = min(n1, n2)
    if not 2 <= n_min <= 3:
        return False
    if subpass == 0:
        return not ((p6 or p7 or not p9) and p8)
    return not ((p2 or p3 or not p5) and p4)


def _thin_sequential(img: np.ndarray) -> np.ndarray:
    """Sequential thinning: re-checks conditions after every deletion, so
    connectivity is always preserved. Fallback for the rare masks where the
    parallel passes would disconnect or erase a component."""
    img = img.copy()
    changed = True
    while changed:
        changed = False
        for subpass in (0, 1):
            rows, cols = np.nonzero(img)
            for r, c in zip(rows.tolist(), cols.tolist()):
                if img[r, c] and _deletable_single(img, r, c, subpass):
                    img[r, c] = False
                    changed = True
    return img


def _simple_point(img: np.ndarray, r: int, c: int) -> bool:
    """True when removing (r, c) keeps its 8-neighborhood connected and the
    pixel is not an endpoint."""
    h, w = img.shape
    ring = []
    for dr, dc in _RING:
        rr, cc = r + dr, c + dc
        ring.append(bool(img[rr, cc]) if 0 <= rr < h and 0 <= cc < w else False)
    count = sum(ring)
    if count < 2:
        return False
    transitions = sum((not ring[i]) and ring[(i + 1) % 8] for i in range(8))
    return transitions == 1


def _break_blocks(img: np.ndarray) -> np.ndarray:
    """Remove one simple pixel from every remaining 2x2 foreground block."""
    img = img.copy()
    changed = True
    while changed:
        changed = False
        blocks = img[:-1, :-1] & img[1:, :-1] & img[:-1, 1:] & img[1:, 1:]
        rows, cols = np.nonzero(blocks)
        for r, c in zip(rows.tolist(), cols.tolist()):
            if not (img[r, c] and img[r + 1, c] and img[r, c + 1] and img[r + 1, c + 1]):
                continue
            for rr, cc in ((r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)):
                if _simple_point(img, rr, cc):
                    img[rr, cc] = False
                    changed = True
                    break
    return img


def _thin_component(img: np.ndarray) -> np.ndarray:
    img = img.copy()
    while True:
        before = int(img.sum())
        changed = True
        while changed:
            changed = False
            for subpass in (0, 1):
                mask = _deletion_mask(img, subpass)
                removed = int(mask.sum())
                if removed == 0:
                    continue
                if removed == int(img.sum()):
                    # A parallel pass may erase a small blob outright; redo
                    # this component sequentially instead.
                    return _break_blocks(_thin_sequential(img))
                img &= ~mask
                changed = True
        img = _break_blocks(img)
        if int(img.sum()) == before:
            return img


def thin(mask: BinaryRaster) -> BinaryRaster:
    """Iterative thinning to a one-pixel-wide skeleton.

    Each 8-connected component is thinned independently; output foreground is
    a subset of the input and component connectivity is preserved. Residual
    2x2 blocks are broken wherever that is possible without disconnecting
    the component.
    """
    if not mask.pixels.any():
        raise EmptyMask("cannot thin an empty mask")
    return BinaryRaster(_thin_array(mask.pixels))


def _thin_array(src: np.ndarray) -> np.ndarray:
    labels, n_components = ndimage.label(src, structure=_EIGHT)
    out = np.zeros_like(src)
    for comp in range(1, n_components + 1):
        comp_mask = labels == comp
        rows, cols = np.nonzero(comp_mask)
        r0, r1 = rows.min(), rows.max() + 1
        c0, c1 = cols.min(), cols.max() + 1
        crop = comp_mask[r0:r1, c0:c1]
        thinned = _thin_component(crop)
        # Verify connectivity survived the parallel passes.
        if thinned.any():
            _, n_after = ndimage.label(thinned, structure=_EIGHT)
        else:
            n_after = 0
        if n_after != 1:
            thinned = _break_blocks(_thin_sequential(crop))
        out[r0:r1, c0:c1] |= thinned
    return out


def _largest_component(img: np.ndarray) -> np.ndarray:
    labels, n = ndimage.label(img, structure=_EIGHT)
    if n <= 1:
        return img
    logger.warning("mask has %d foreground components; keeping the largest", n)
    sizes = ndimage.sum_labels(img, labels, index=range(1, n + 1))
    return labels == (int(np.argmax(sizes)) + 1)


def largest_component(mask: BinaryRaster) -> BinaryRaster:
    """Reduce a mask to its largest 8-connected foreground component."""
    if not mask.pixels.any():
        raise EmptyMask("mask has no foreground")
    return BinaryRaster(_largest_component(mask.pixels))


def boundary_polygon(mask: BinaryRaster) -> Polygon:
    """Outer boundary contour of the (largest) foreground component, one
    vertex per boundary pixel, positive-shoelace orientation."""
    img = mask.pixels
    if not img.any():
        raise EmptyMask("cannot trace an empty mask")
    img = _largest_component(img)

    rows, cols = np.nonzero(img)
    start = (int(rows[0]), int(cols[0]))  # topmost, then leftmost

    h, w = img.shape

    def fg(r, c):
        return 0 <= r < h and 0 <= c < w and img[r, c]

    def step(cur, backtrack):
        """Scan cur's ring clockwise from backtrack; return the first
        foreground neighbor and the background pixel checked before it."""
        base = _RING.index((backtrack[0] - cur[0], backtrack[1] - cur[1]))
        for offset in range(1, 9):
            dr, dc = _RING[(base + offset) % 8]
            cand = (cur[0] + dr, cur[1] + dc)
            if fg(*cand):
                prev_dr, prev_dc = _RING[(base + offset - 1) % 8]
                return cand, (cur[0] + prev_dr, cur[1] + prev_dc)
        return None, None

    # Moore neighbor tracing. The walk ends when the first move out of the
    # start pixel repeats (Jacob's stopping criterion), so spurs that pass
    # through the start pixel several times are traced fully.
    contour = [start]
    cur = start
    backtrack = (start[0], start[1] - 1)  # west neighbor is background
    first_move = None
    for _ in range(4 * img.size + 4):
        nxt, nb = step(cur, backtrack)
        if nxt is None:
            break  # isolated pixel
        if cur == start:
            move = (nxt, nb)
            if first_move is None:
                first_move = move
            elif move == first_move:
                break
        contour.append(nxt)
        cur, backtrack = nxt, nb

    # The trace returns to the start pixel; drop closing repeats and
    # consecutive duplicates.
    verts: list[tuple[int, int]] = []
    for r, c in contour:
        if not verts or verts[-1] != (r, c):
            verts.append((r, c))
    while len(verts) > 1 and verts[0] == verts[-1]:
        verts.pop()
    if len(verts) < 3:
        raise DegenerateShape(
            f"boundary contour has only {len(verts)} vertices; shape too small"
        )
    points = tuple(Point2D(float(c), float(r)) for r, c in verts)
    poly = Polygon(vertices=points)
    if poly.signed_area() < 0:
        poly = Polygon(vertices=tuple(reversed(points)))
    return poly


def _relevance(prev_pt, cur, nxt) -> float:
    e1x, e1y = cur[0] - prev_pt[0], cur[1] - prev_pt[1]
    e2x, e2y = nxt[0] - cur[0], nxt[1] - cur[1]
    l1 = math.hypot(e1x, e1y)
    l2 = math.hypot(e2x, e2y)
    if l1 + l2 == 0.0:
        return 0.0
    beta = abs(math.atan2(e1x * e2y - e1y * e2x, e1x * e2x + e1y * e2y))
    return beta * l1 * l2 / (l1 + l2)


def dce_simplify(
    poly: Polygon,
    target_vertices: int,
    min_relevance: float | None = None,
) -> Polygon:
    """Discrete curve evolution: repeatedly drop the least relevant vertex.

    relevance(v) = turn_angle(v) * l1 * l2 / (l1 + l2) over the two incident
    segments, recomputed on the partially simplified polygon after each
    removal. Stops at max(3, target_vertices); when min_relevance is given,
    stops early once every remaining vertex is more relevant than that
    (the target then acts as a floor). Ties break on the lowest original
    vertex index.
    """
    if target_vertices < 3:
        raise TargetTooSmall(f"target_vertices must be >= 3, got {target_vertices}")
    n = len(poly)
    target = max(3, min(target_vertices, n))

    pts = [(v.x, v.y) for v in poly.vertices]
    prev_idx = [(i - 1) % n for i in range(n)]
    next_idx = [(i + 1) % n for i in range(n)]
    alive = [True] * n
    relevance = [
        _relevance(pts[prev_idx[i]], pts[i], pts[next_idx[i]]) for i in range(n)
    ]
    heap = [(relevance[i], i) for i in range(n)]
    heapq.heapify(heap)
    remaining = n

    while remaining > target:
        rel, idx = heapq.heappop(heap)
        if not alive[idx] or rel != relevance[idx]:
            continue  # stale entry
        if min_relevance is not None and rel > min_relevance:
            break
        alive[idx] = False
        remaining -= 1
        p, q = prev_idx[idx], next_idx[idx]
        next_idx[p] = q
        prev_idx[q] = p
        for neighbor in (p, q):
            relevance[neighbor] = _relevance(
                pts[prev_idx[neighbor]], pts[neighbor], pts[next_idx[neighbor]]
            )
            heapq.heappush(heap, (relevance[neighbor], neighbor))

    kept = [i for i in range(n) if alive[i]]
    return Polygon(vertices=tuple(poly.vertices[i] for i in kept))


def convex_vertices(poly: Polygon) -> list[Point2D]:
    """Vertices with a convex interior angle for the polygon's orientation."""
    verts = poly.vertices
    if poly.signed_area() < 0:
        verts = tuple(reversed(verts))
    n = len(verts)
    out = []
    for i in range(n):
        a, b, c = verts[(i - 1) % n], verts[i], verts[(i + 1) % n]
        cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
        if cross > 0:
            out.append(b)
    return out


def _nearest_on_segment(px, py, ax, ay, bx, by) -> tuple[float, float]:
    vx, vy = bx - ax, by - ay
    denom = vx * vx + vy * vy
    if denom == 0.0:
        return ax, ay
    t = ((px - ax) * vx + (py - ay) * vy) / denom
    t = max(0.0, min(1.0, t))
    return ax + t * vx, ay + t * vy


def _nearest_boundary_point(px, py, poly: Polygon) -> tuple[float, float]:
    best = None
    best_d = math.inf
    verts = poly.vertices
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        qx, qy = _nearest_on_segment(px, py, a.x, a.y, b.x, b.y)
        d = (qx - px) ** 2 + (qy - py) ** 2
        if d < best_d:
            best_d = d
            best = (qx, qy)
    return best


def _neighbor_counts(img: np.ndarray) -> np.ndarray:
    kernel = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]])
    return ndimage.convolve(img.astype(np.uint8), kernel, mode="constant")


def _trace_branch(img: np.ndarray, counts: np.ndarray, start: tuple[int, int]):
    """Walk from an endpoint pixel toward the first junction pixel.

    Returns the branch pixels (junction excluded), or None when the walk
    ends at another endpoint or dead end: that is the skeleton trunk, which
    is never pruned.
    """
    path = [start]
    prev = None
    cur = start
    for _ in range(img.size):
        nxt = None
        for dr, dc in _RING:
            cand = (cur[0] + dr, cur[1] + dc)
            if cand == prev:
                continue
            if 0 <= cand[0] < img.shape[0] and 0 <= cand[1] < img.shape[1] and img[cand]:
                nxt = cand
                break
        if nxt is None:
            return None  # lone pixel or dead end
        if counts[nxt] >= 3:
            return path  # junction reached; the junction pixel stays
        if counts[nxt] == 1:
            return None  # reached the opposite endpoint
        prev, cur = cur, nxt
        path.append(cur)
    return None


def prune_skeleton(
    skel: BinaryRaster,
    simplified: Polygon,
    delta_prune: float = 5.0,
) -> BinaryRaster:
    """Delete skeleton branches that do not aim at a convex vertex of the
    simplified boundary polygon.

    A branch runs from an endpoint to the first junction. It survives when
    the boundary point nearest its endpoint lies within delta_prune of a
    convex polygon vertex. Deletion repeats until stable; a skeleton without
    junctions is returned unchanged.
    """
    img = skel.pixels.copy()
    if not img.any():
        return BinaryRaster(img)
    convex = convex_vertices(simplified)
    if not convex:
        return BinaryRaster(img)

    while True:
        removed_in_cycle = False
        while True:
            counts = _neighbor_counts(img)
            endpoints = np.argwhere(img & (counts == 1))
            removed_any = False
            for r, c in [tuple(e) for e in endpoints]:
                if not img[r, c]:
                    continue
                branch = _trace_branch(img, counts, (r, c))
                if branch is None:
                    continue
                bx, by = _nearest_boundary_point(float(c), float(r), simplified)
                d = min(math.hypot(bx - v.x, by - v.y) for v in convex)
                if d > delta_prune:
                    for pr, pc in branch:
                        img[pr, pc] = False
                    removed_any = True
            removed_in_cycle |= removed_any
            if not removed_any:
                break
        if not removed_in_cycle or not img.any():
            break
        # Re-thinning clears redundant junction residue left where pruned
        # branches attached to the trunk; it can expose new prunable
        # branches, so the outer loop runs to a joint fixpoint.
        img = _thin_array(img)
    return BinaryRaster(img)


def detect_points(skel: BinaryRaster) -> SkeletonPoints:
    """Classify skeleton pixels by 8-neighbor count: 1 = endpoint, >= 3 =
    junction candidate. Adjacent junction candidates merge into a single
    junction at the cluster pixel nearest their centroid."""
    img = skel.pixels
    if not img.any():
        raise EmptyMask("cannot detect points on an empty skeleton")
    counts = _neighbor_counts(img)
    endpoints = [
        Point2D(float(c), float(r)) for r, c in np.argwhere(img & (counts == 1))
    ]

    candidates = img & (counts >= 3)
    junctions = []
    labels, n = ndimage.label(candidates, structure=_EIGHT)
    h, w = img.shape
    for comp in range(1, n + 1):
        members = np.argwhere(labels == comp)
        centroid_r = members[:, 0].mean()
        centroid_c = members[:, 1].mean()
        snapped_r = int(math.floor(centroid_r + 0.5))
        snapped_c = int(math.floor(centroid_c + 0.5))
        on_cluster = (
            0 <= snapped_r < h
            and 0 <= snapped_c < w
            and labels[snapped_r, snapped_c] == comp
        )
        if not on_cluster:
            # Fall back to the cluster pixel nearest the centroid so the
            # junction always sits on a skeleton pixel.
            d2 = (members[:, 0] - centroid_r) ** 2 + (members[:, 1] - centroid_c) ** 2
            best = np.lexsort((members[:, 1], members[:, 0], d2))[0]
            snapped_r, snapped_c = int(members[best, 0]), int(members[best, 1])
        junctions.append(Point2D(float(snapped_c), float(snapped_r)))

    return SkeletonPoints(endpoints=tuple(endpoints), junctions=tuple(junctions))
