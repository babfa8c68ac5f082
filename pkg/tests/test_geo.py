import math
import random

import pytest

import oracles
from evsite.geo import (
    EARTH_RADIUS_M,
    GeoError,
    GeoPoint,
    MultiPolygon,
    Polygon,
    build_index,
    haversine_distance,
    point_in_polygon,
    project_to_polyline,
)


def ring(*latlons):
    return tuple(GeoPoint(lat, lon) for lat, lon in latlons)


UNIT_SQUARE = Polygon(ring((0, 0), (0, 1), (1, 1), (1, 0), (0, 0)))


class TestGeoPoint:
    def test_valid(self):
        GeoPoint(-33.8568, 151.2153)

    @pytest.mark.parametrize("lat,lon", [(91, 0), (-91, 0), (0, 181), (0, -181),
                                         (float("nan"), 0), (0, float("inf"))])
    def test_invalid(self, lat, lon):
        with pytest.raises(GeoError):
            GeoPoint(lat, lon)


class TestHaversine:
    def test_identity(self):
        p = GeoPoint(-33.8568, 151.2153)
        assert haversine_distance(p, p) == 0.0

    def test_antipodal(self):
        d = haversine_distance(GeoPoint(0, 0), GeoPoint(0, 180))
        assert d == pytest.approx(math.pi * EARTH_RADIUS_M, rel=1e-12)

    def test_sydney_pair_vs_oracle(self):
        a = GeoPoint(-33.8568, 151.2153)
        b = GeoPoint(-33.8650, 151.2094)
        expected = oracles.haversine_oracle(a.lat, a.lon, b.lat, b.lon)
        assert haversine_distance(a, b) == pytest.approx(expected, rel=1e-6)

    def test_random_pairs_vs_oracle(self):
        rng = random.Random(1)
        for _ in range(2000):
            a = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            b = GeoPoint(rng.uniform(-80, 80), rng.uniform(-179, 179))
            expected = oracles.haversine_oracle(a.lat, a.lon, b.lat, b.lon)
            assert haversine_distance(a, b) == pytest.approx(expected, rel=1e-6, abs=1e-6)

    def test_symmetry_and_triangle(self):
        rng = random.Random(2)
        for _ in range(300):
            pts = [GeoPoint(rng.uniform(-60, 60), rng.uniform(-179, 179))
                   for _ in range(3)]
            a, b, c = pts
            assert haversine_distance(a, b) == haversine_distance(b, a)
            ab = haversine_distance(a, b)
            bc = haversine_distance(b, c)
            ac = haversine_distance(a, c)
            assert ac <= ab + bc + 1e-9 * (ab + bc + 1)


class TestPointInPolygon:
    def test_center_of_square(self):
        assert point_in_polygon(GeoPoint(0.5, 0.5), MultiPolygon((UNIT_SQUARE,)))

    def test_outside_bbox(self):
        assert not point_in_polygon(GeoPoint(5, 5), MultiPolygon((UNIT_SQUARE,)))

    def test_on_edge_counts_inside(self):
        assert point_in_polygon(GeoPoint(0.0, 0.5), MultiPolygon((UNIT_SQUARE,)))
        assert point_in_polygon(GeoPoint(0.0, 0.0), MultiPolygon((UNIT_SQUARE,)))

    def test_point_in_hole_is_outside(self):
        hole = ring((0.4, 0.4), (0.4, 0.6), (0.6, 0.6), (0.6, 0.4), (0.4, 0.4))
        poly = MultiPolygon((Polygon(UNIT_SQUARE.exterior, (hole,)),))
        assert not point_in_polygon(GeoPoint(0.5, 0.5), poly)
        assert point_in_polygon(GeoPoint(0.2, 0.2), poly)

    def test_random_polygons_vs_crossing_oracle(self):
        rng = random.Random(3)
        agree = disagreements_near_edge = 0
        for _ in range(1000):
            # random simple star-shaped polygon around a center
            clat = rng.uniform(-50, 50)
            clon = rng.uniform(-50, 50)
            n = rng.randint(3, 9)
            verts = []
            for k in range(n):
                ang = 2 * math.pi * k / n
                r = rng.uniform(0.2, 1.5)
                verts.append((clon + r * math.cos(ang), clat + r * math.sin(ang)))
            verts.append(verts[0])
            poly = MultiPolygon((Polygon(
                tuple(GeoPoint(lat, lon) for lon, lat in verts)),))
            p = GeoPoint(clat + rng.uniform(-2, 2), clon + rng.uniform(-2, 2))
            got = point_in_polygon(p, poly)
            want = oracles.crossing_count_inside(p.lon, p.lat, [verts])
            if got == want:
                agree += 1
            else:
                assert oracles.min_edge_distance_deg(p.lon, p.lat, [verts]) < 1e-9
                disagreements_near_edge += 1
        assert agree >= 999


class TestSpatialIndex:
    def test_empty(self):
        idx = build_index([], 0.01)
        assert idx.neighbors_within(GeoPoint(0, 0), 1e7) == []

    def test_identical_points(self):
        p = GeoPoint(10, 10)
        idx = build_index([p, p, p], 0.01)
        assert idx.neighbors_within(p, 0.0) == [0, 1, 2]

    def test_radius_zero_and_huge(self):
        rng = random.Random(4)
        pts = [GeoPoint(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(50)]
        idx = build_index(pts, 0.05)
        assert idx.neighbors_within(pts[7], 0.0) == [7]
        assert idx.neighbors_within(GeoPoint(0, 0), 2e7) == list(range(50))

    def test_radius_queries_vs_linear_scan(self):
        rng = random.Random(5)
        pts = [GeoPoint(rng.uniform(-34, -33), rng.uniform(150, 151))
               for _ in range(500)]
        coords = [(p.lat, p.lon) for p in pts]
        idx = build_index(pts, 0.01)
        for _ in range(50):
            q = GeoPoint(rng.uniform(-34.2, -32.8), rng.uniform(149.8, 151.2))
            r = rng.uniform(0, 30000)
            assert idx.neighbors_within(q, r) == oracles.linear_neighbors(
                coords, q.lat, q.lon, r)

    def test_nearest_single_and_exact(self):
        p = GeoPoint(-33.5, 150.5)
        idx = build_index([p], 0.01)
        assert idx.nearest(GeoPoint(-34, 151)) == (0, pytest.approx(
            oracles.haversine_oracle(-34, 151, -33.5, 150.5)))
        assert idx.nearest(p) == (0, 0.0)

    def test_nearest_vs_linear_scan(self):
        rng = random.Random(6)
        pts = [GeoPoint(rng.uniform(-34, -33), rng.uniform(150, 151))
               for _ in range(300)]
        coords = [(p.lat, p.lon) for p in pts]
        idx = build_index(pts, 0.02)
        for _ in range(100):
            q = GeoPoint(rng.uniform(-35, -32), rng.uniform(149, 152))
            got_id, got_d = idx.nearest(q)
            want_id, want_d = oracles.linear_nearest(coords, q.lat, q.lon)
            assert got_id == want_id
            assert got_d == pytest.approx(want_d)
            # argmin optimality over every indexed point
            assert all(got_d <= oracles.haversine_oracle(q.lat, q.lon, *c) + 1e-9
                       for c in coords)

    def test_nearest_empty_errors(self):
        with pytest.raises(GeoError, match="empty index"):
            build_index([], 0.01).nearest(GeoPoint(0, 0))


class TestProjectToPolyline:
    def test_at_vertex(self):
        line = [GeoPoint(0, 0), GeoPoint(0, 1)]
        pt, d = project_to_polyline(GeoPoint(0, 1), line)
        assert d == 0.0
        assert (pt.lat, pt.lon) == (0, 1)

    def test_perpendicular_bisector_hits_midpoint(self):
        line = [GeoPoint(0, 0), GeoPoint(0, 0.2)]
        pt, d = project_to_polyline(GeoPoint(0.1, 0.1), line)
        assert pt.lon == pytest.approx(0.1, abs=1e-9)
        assert pt.lat == pytest.approx(0.0, abs=1e-9)

    def test_degenerate_errors(self):
        with pytest.raises(GeoError, match="degenerate polyline"):
            project_to_polyline(GeoPoint(0, 0), [GeoPoint(0, 0)])

    def test_random_vs_dense_sampling(self):
        rng = random.Random(7)
        for _ in range(40):
            base_lat = rng.uniform(-35, -33)
            base_lon = rng.uniform(150, 151)
            line = [GeoPoint(base_lat + rng.uniform(-0.05, 0.05),
                             base_lon + rng.uniform(-0.05, 0.05))
                    for _ in range(rng.randint(2, 4))]
            q = GeoPoint(base_lat + rng.uniform(-0.05, 0.05),
                         base_lon + rng.uniform(-0.05, 0.05))
            _, got_d = project_to_polyline(q, line)
            _, want_d = oracles.dense_projection(
                q.lat, q.lon, [(v.lat, v.lon) for v in line],
                samples_per_segment=20000)
            assert abs(got_d - want_d) < 1.0
