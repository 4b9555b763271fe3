import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triskel import DataError, DegenerateTriangle, delaunay
from triskel.errors import EmptyMatrix, NoValidTriangles
from triskel.features import (
    FeatureMatrix,
    Interval,
    IntervalVector,
    TriangleFeatures,
    assimilate,
    sample_features,
    triangle_features,
)
from triskel.geometry import Point2D, Triangle, Triangulation

from oracles import triangle_angles_by_atan2


def nondegenerate_triangle(draw_scale=100.0, min_area=1.0):
    """Hypothesis strategy for triangles with decent area."""
    coord = st.floats(0, draw_scale, allow_nan=False, allow_infinity=False, width=32)
    return (
        st.tuples(coord, coord, coord, coord, coord, coord)
        .map(lambda v: ((v[0], v[1]), (v[2], v[3]), (v[4], v[5])))
        .filter(
            lambda t: abs(
                (t[1][0] - t[0][0]) * (t[2][1] - t[0][1])
                - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0])
            )
            / 2.0
            > min_area
        )
    )


class TestTriangleFeatures:
    def test_3_4_5_right_triangle(self):
        tf = triangle_features((0, 0), (3, 0), (0, 4))
        assert tf.lengths == pytest.approx((5.0, 4.0, 3.0), abs=1e-12)
        assert tf.angles == pytest.approx((90.0, 53.130102, 36.869898), abs=1e-6)

    def test_equilateral(self):
        tf = triangle_features((0, 0), (1, 0), (0.5, math.sqrt(3) / 2))
        assert tf.lengths == pytest.approx((1.0, 1.0, 1.0), abs=1e-12)
        assert tf.angles == pytest.approx((60.0, 60.0, 60.0), abs=1e-9)

    def test_obtuse_matches_atan2_oracle(self):
        tf = triangle_features((0, 0), (6, 0), (1, 1))
        expected = triangle_angles_by_atan2((0, 0), (6, 0), (1, 1))
        for (exp_len, exp_ang), got_len, got_ang in zip(
            expected, tf.lengths, tf.angles
        ):
            assert got_len == pytest.approx(exp_len, abs=1e-9)
            assert got_ang == pytest.approx(exp_ang, abs=1e-6)

    def test_collinear_raises(self):
        with pytest.raises(DegenerateTriangle):
            triangle_features((0, 0), (1, 1), (2, 2))

    def test_permutation_invariance(self):
        pts = [(0.5, 0.25), (7.25, 1.5), (3.0, 5.75)]
        base = triangle_features(*pts)
        import itertools

        for perm in itertools.permutations(pts):
            assert triangle_features(*perm) == base

    def test_translation_and_reflection_exact(self):
        # Dyadic coordinates so translated sums stay exactly representable.
        rng = np.random.default_rng(5)
        for _ in range(50):
            pts = [
                (int(rng.integers(0, 4096)) / 64.0, int(rng.integers(0, 4096)) / 64.0)
                for _ in range(3)
            ]
            try:
                base = triangle_features(*pts)
            except DegenerateTriangle:
                continue
            tx, ty = int(rng.integers(-512, 512)), int(rng.integers(-512, 512))
            shifted = triangle_features(*[(x + tx, y + ty) for x, y in pts])
            mirrored = triangle_features(*[(-x, y) for x, y in pts])
            assert shifted == base
            assert mirrored == base

    def test_rotation_within_tolerance(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            pts = rng.uniform(0, 100, size=(3, 2))
            area = abs(
                (pts[1, 0] - pts[0, 0]) * (pts[2, 1] - pts[0, 1])
                - (pts[1, 1] - pts[0, 1]) * (pts[2, 0] - pts[0, 0])
            )
            if area < 2.0:
                continue
            theta = rng.uniform(0, 2 * math.pi)
            ct, s = math.cos(theta), math.sin(theta)
            rotated = [(ct * x - s * y, s * x + ct * y) for x, y in pts]
            base = triangle_features(*pts)
            rot = triangle_features(*rotated)
            for u, v in zip(base.lengths + base.angles, rot.lengths + rot.angles):
                assert v == pytest.approx(u, rel=1e-9, abs=1e-9)

    def test_scale_covariance(self):
        pts = [(0.0, 0.0), (9.5, 1.25), (3.5, 7.0)]
        base = triangle_features(*pts)
        s = 3.5
        scaled = triangle_features(*[(s * x, s * y) for x, y in pts])
        for u, v in zip(base.lengths, scaled.lengths):
            assert v == pytest.approx(s * u, rel=1e-12)
        for u, v in zip(base.angles, scaled.angles):
            assert v == pytest.approx(u, abs=1e-9)

    @given(nondegenerate_triangle())
    @settings(max_examples=150, deadline=None)
    def test_property_angles_sane(self, tri):
        tf = triangle_features(*tri)
        a, b, c = tf.lengths
        big, mid, small = tf.angles
        assert a >= b >= c > 0
        assert big >= mid >= small > 0
        assert big + mid + small == pytest.approx(180.0, abs=1e-6)
        assert b + c > a
        expected = triangle_angles_by_atan2(*tri)
        for (exp_len, exp_ang), got_ang in zip(expected, tf.angles):
            assert got_ang == pytest.approx(exp_ang, abs=1e-6)

    def test_canonical_order_invariant_fields(self):
        with pytest.raises(DataError):
            TriangleFeatures(lengths=(1.0, 2.0, 3.0), angles=(60.0, 60.0, 60.0))
        with pytest.raises(DataError):
            TriangleFeatures(lengths=(3.0, 2.0, 1.5), angles=(90.0, 60.0, 40.0))


class TestSampleFeatures:
    def test_matches_geometry_example(self):
        tri = delaunay([(0, 0), (3, 0), (0, 3), (1, 1)])
        fm = sample_features(tri)
        assert fm.m == 3
        assert fm.dropped == 0
        for row, t in zip(fm.rows, tri.triangles):
            assert row == triangle_features(*tri.triangle_points(t))

    def test_single_triangle_passthrough(self):
        tri = delaunay([(0, 0), (4, 0), (0, 4)])
        fm = sample_features(tri)
        assert fm.m == 1
        assert fm.rows[0] == triangle_features((0, 0), (4, 0), (0, 4))

    def test_sliver_dropped(self):
        points = (
            Point2D(0, 0),
            Point2D(4, 0),
            Point2D(0, 4),
            Point2D(2, 2 + 1e-14),
        )
        tris = (Triangle(0, 1, 2), Triangle(1, 3, 2))
        tri = Triangulation(points=points, triangles=tris, hull=(0, 1, 2))
        fm = sample_features(tri)
        assert fm.m == 1
        assert fm.dropped == 1

    def test_all_dropped_raises(self):
        points = (Point2D(0, 0), Point2D(1, 0), Point2D(2, 1e-15))
        tri = Triangulation(points=points, triangles=(Triangle(0, 1, 2),), hull=(0, 1, 2))
        with pytest.raises(NoValidTriangles):
            sample_features(tri)


class TestAssimilate:
    def _fm(self, rows):
        return FeatureMatrix(
            rows=tuple(
                TriangleFeatures(lengths=tuple(r[:3]), angles=tuple(r[3:]))
                for r in rows
            )
        )

    def test_two_similar_right_triangles(self):
        fm = self._fm(
            [
                (5, 4, 3, 90, 53.13, 36.87),
                (10, 8, 6, 90, 53.13, 36.87),
            ]
        )
        iv = assimilate(fm)
        assert [i.as_pair() for i in iv.lengths] == [[5, 10], [4, 8], [3, 6]]
        assert [i.as_pair() for i in iv.angles] == [
            [90, 90],
            [53.13, 53.13],
            [36.87, 36.87],
        ]

    def test_single_row_point_intervals(self):
        tf = triangle_features((0, 0), (3, 0), (0, 4))
        iv = assimilate(FeatureMatrix(rows=(tf,)))
        for interval, v in zip(iv.lengths + iv.angles, tf.row()):
            assert interval.lo == interval.hi == v

    def test_matches_brute_force_column_scan(self):
        rng = np.random.default_rng(9)
        rows = []
        while len(rows) < 50:
            pts = rng.uniform(0, 200, size=(3, 2))
            try:
                rows.append(triangle_features(*pts))
            except DegenerateTriangle:
                continue
        fm = FeatureMatrix(rows=tuple(rows))
        iv = assimilate(fm)
        data = np.array([r.row() for r in rows])
        for p in range(3):
            assert iv.lengths[p].lo == data[:, p].min()
            assert iv.lengths[p].hi == data[:, p].max()
            assert iv.angles[p].lo == data[:, 3 + p].min()
            assert iv.angles[p].hi == data[:, 3 + p].max()

    def test_containment(self):
        rng = np.random.default_rng(10)
        rows = []
        while len(rows) < 20:
            pts = rng.uniform(0, 50, size=(3, 2))
            try:
                rows.append(triangle_features(*pts))
            except DegenerateTriangle:
                continue
        iv = assimilate(FeatureMatrix(rows=tuple(rows)))
        for r in rows:
            assert iv.contains_row(r)

    def test_monotonicity_adding_rows_never_shrinks(self):
        rng = np.random.default_rng(11)
        rows = []
        while len(rows) < 10:
            pts = rng.uniform(0, 50, size=(3, 2))
            try:
                rows.append(triangle_features(*pts))
            except DegenerateTriangle:
                continue
        for n in range(1, len(rows)):
            small = assimilate(FeatureMatrix(rows=tuple(rows[:n])))
            big = assimilate(FeatureMatrix(rows=tuple(rows[: n + 1])))
            for a, b in zip(small.lengths + small.angles, big.lengths + big.angles):
                assert b.lo <= a.lo and a.hi <= b.hi

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmptyMatrix):
            FeatureMatrix(rows=())


class TestSerialization:
    def test_feature_matrix_json_round_trip(self):
        tri = delaunay([(0, 0), (3, 0), (0, 3), (1, 1)])
        fm = sample_features(tri)
        back = FeatureMatrix.from_json_dict(fm.to_json_dict())
        assert back == fm

    def test_interval_vector_json_round_trip(self):
        tri = delaunay([(0, 0), (3, 0), (0, 3), (1, 1)])
        iv = assimilate(sample_features(tri))
        back = IntervalVector.from_json_dict(iv.to_json_dict())
        assert back == iv

    def test_csv_layout(self):
        tf = triangle_features((0, 0), (3, 0), (0, 4))
        csv_text = FeatureMatrix(rows=(tf,)).to_csv()
        lines = csv_text.strip().splitlines()
        assert lines[0] == "a,b,c,A,B,C"
        values = [float(v) for v in lines[1].split(",")]
        assert values == pytest.approx(list(tf.row()))

    def test_interval_validates_order(self):
        with pytest.raises(DataError):
            Interval(2.0, 1.0)
