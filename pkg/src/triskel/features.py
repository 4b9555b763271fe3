"""Per-triangle length/angle features and their interval-valued aggregation.

Each triangle is reduced to a canonical row of 3 side lengths (descending)
and the 3 opposite interior angles. A sample's rows are assimilated into six
closed [min, max] intervals, one per column.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .errors import DataError, DegenerateTriangle, EmptyMatrix, NoValidTriangles
from .geometry import EPS_AREA, Triangulation, orient2d
from .validation import as_xy

ANGLE_SUM_TOL = 1e-6


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise DataError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def as_pair(self) -> list[float]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class TriangleFeatures:
    """Canonical triangle descriptor: side lengths sorted descending and the
    interior angles opposite them, in degrees."""

    lengths: tuple[float, float, float]
    angles: tuple[float, float, float]

    def __post_init__(self):
        a, b, c = self.lengths
        big, mid, small = self.angles
        if not (a >= b >= c > 0):
            raise DataError(f"lengths must be sorted descending and positive: {self.lengths}")
        if not (big >= mid >= small > 0):
            raise DataError(f"angles must be sorted descending and positive: {self.angles}")
        if abs(big + mid + small - 180.0) > ANGLE_SUM_TOL:
            raise DataError(f"angles must sum to 180 degrees: {self.angles}")
        if not b + c > a:
            raise DataError(f"triangle inequality violated: {self.lengths}")

    def row(self) -> tuple[float, ...]:
        return self.lengths + self.angles


def triangle_features(p1, p2, p3, eps_area: float = EPS_AREA) -> TriangleFeatures:
    """Side lengths and opposite angles of a triangle, canonically ordered.

    The largest angle comes from the cosine rule (safe for obtuse triangles),
    the smallest from the sine rule (always acute), and the middle one from
    the 180-degree sum.
    """
    q1, q2, q3 = as_xy(p1), as_xy(p2), as_xy(p3)
    area = abs(orient2d(q1, q2, q3)) / 2.0
    if area < eps_area:
        raise DegenerateTriangle(f"collinear points within tolerance: area={area}")

    sides = sorted(
        (
            math.dist(q2, q3),
            math.dist(q1, q3),
            math.dist(q1, q2),
        ),
        reverse=True,
    )
    a, b, c = sides
    cos_a = (b * b + c * c - a * a) / (2.0 * b * c)
    angle_a = math.degrees(math.acos(max(-1.0, min(1.0, cos_a))))
    sin_c = c * math.sin(math.radians(angle_a)) / a
    angle_c = math.degrees(math.asin(max(-1.0, min(1.0, sin_c))))
    angle_b = 180.0 - angle_a - angle_c
    # Descending re-sort guards the pairing against last-ulp noise when two
    # sides are equal.
    big, mid, small = sorted((angle_a, angle_b, angle_c), reverse=True)
    return TriangleFeatures(lengths=(a, b, c), angles=(big, mid, small))


@dataclass(frozen=True)
class FeatureMatrix:
    """All triangle rows of one sample plus the count of degenerate triangles
    that were dropped on the way."""

    rows: tuple[TriangleFeatures, ...]
    dropped: int = 0

    def __post_init__(self):
        if len(self.rows) < 1:
            raise EmptyMatrix("a feature matrix needs at least one row")

    @property
    def m(self) -> int:
        return len(self.rows)

    def to_json_dict(self) -> dict:
        return {
            "triangles": [list(r.row()) for r in self.rows],
            "dropped": self.dropped,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FeatureMatrix":
        rows = tuple(
            TriangleFeatures(lengths=tuple(r[:3]), angles=tuple(r[3:]))
            for r in data["triangles"]
        )
        return cls(rows=rows, dropped=int(data.get("dropped", 0)))

    def to_csv(self) -> str:
        lines = ["a,b,c,A,B,C"]
        for r in self.rows:
            lines.append(",".join(repr(v) for v in r.row()))
        return "\n".join(lines) + "\n"


def sample_features(tri: Triangulation, eps_area: float = EPS_AREA) -> FeatureMatrix:
    """One TriangleFeatures row per triangulation triangle; degenerate slivers
    are dropped and counted rather than aborting the sample."""
    rows = []
    dropped = 0
    for t in tri.triangles:
        p1, p2, p3 = tri.triangle_points(t)
        try:
            rows.append(triangle_features(p1, p2, p3, eps_area))
        except DegenerateTriangle:
            dropped += 1
    if not rows:
        raise NoValidTriangles(
            f"all {dropped} triangles were degenerate below area {eps_area}"
        )
    return FeatureMatrix(rows=tuple(rows), dropped=dropped)


@dataclass(frozen=True)
class IntervalVector:
    """Six closed intervals assimilating all rows of one sample: three for
    side lengths, three for angles."""

    lengths: tuple[Interval, Interval, Interval]
    angles: tuple[Interval, Interval, Interval]

    def __post_init__(self):
        for iv in self.angles:
            if not (0.0 < iv.lo and iv.hi < 180.0):
                raise DataError(f"angle interval out of (0, 180): {iv}")

    def contains_row(self, features: TriangleFeatures) -> bool:
        return all(
            iv.contains(v) for iv, v in zip(self.lengths, features.lengths)
        ) and all(iv.contains(v) for iv, v in zip(self.angles, features.angles))

    def to_json_dict(self) -> dict:
        return {
            "lengths": [iv.as_pair() for iv in self.lengths],
            "angles": [iv.as_pair() for iv in self.angles],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "IntervalVector":
        return cls(
            lengths=tuple(Interval(lo, hi) for lo, hi in data["lengths"]),
            angles=tuple(Interval(lo, hi) for lo, hi in data["angles"]),
        )


def assimilate(fm: FeatureMatrix) -> IntervalVector:
    """Column-wise [min, max] over all rows (point intervals when m = 1)."""
    if fm.m < 1:
        raise EmptyMatrix("cannot assimilate an empty feature matrix")
    lengths = []
    angles = []
    for p in range(3):
        col = [r.lengths[p] for r in fm.rows]
        lengths.append(Interval(min(col), max(col)))
        col = [r.angles[p] for r in fm.rows]
        angles.append(Interval(min(col), max(col)))
    return IntervalVector(lengths=tuple(lengths), angles=tuple(angles))
