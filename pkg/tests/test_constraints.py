import math
import random

import pytest

import oracles
from evsite.constraints import (
    AdjustedParams,
    ConstraintConfig,
    ConstraintError,
    PointContext,
    RouteLocator,
    adjust_params,
    annotate_context,
    estimate_altitude,
    lookup_ffdi,
)
from evsite.geo import BoundingBox, GeoPoint
from evsite.ingest import DemandPoint, FireRiskGrid, PoiRecord, RouteRecord

NEUTRAL = ConstraintConfig(eps_factor_poi=1.0, minpts_factor_poi=1.0,
                           minpts_factor_route=1.0, minpts_factor_flood=1.0,
                           minpts_factor_fire=1.0)


def make_route(route_id, latlon_alts):
    return RouteRecord(route_id,
                       tuple(GeoPoint(lat, lon) for lat, lon, _ in latlon_alts),
                       tuple(a for _, _, a in latlon_alts))


class TestEstimateAltitude:
    def test_at_vertex(self):
        route = make_route("r1", [(-33.5, 150.0, 12.0), (-33.5, 150.1, 30.0)])
        assert estimate_altitude(GeoPoint(-33.5, 150.1), [route]) == 30.0

    def test_single_vertex_universe(self):
        route = make_route("r1", [(-33.5, 150.0, 12.0), (-33.5, 150.0001, 12.5)])
        assert estimate_altitude(GeoPoint(0.0, 0.0), [route]) in (12.0, 12.5)

    def test_no_routes_errors(self):
        with pytest.raises(ConstraintError, match="no altitude source"):
            estimate_altitude(GeoPoint(0, 0), [])

    def test_random_vs_linear_scan(self):
        rng = random.Random(11)
        routes = []
        coords, alts = [], []
        for r in range(5):
            pts = [(rng.uniform(-34, -33), rng.uniform(150, 151), rng.uniform(0, 500))
                   for _ in range(6)]
            routes.append(make_route(f"r{r}", pts))
            for lat, lon, a in pts:
                coords.append((lat, lon))
                alts.append(a)
        for _ in range(100):
            p = GeoPoint(rng.uniform(-34.2, -32.8), rng.uniform(149.8, 151.2))
            want_id, _ = oracles.linear_nearest(coords, p.lat, p.lon)
            assert estimate_altitude(p, routes) == alts[want_id]


class TestLookupFfdi:
    def test_single_cell(self):
        grid = FireRiskGrid(BoundingBox(-34, 150, -33, 151), 1, 1, (3.5,))
        assert lookup_ffdi(GeoPoint(-33.5, 150.5), grid) == 3.5

    def test_outside_bbox(self):
        grid = FireRiskGrid(BoundingBox(-34, 150, -33, 151), 1, 1, (3.5,))
        assert lookup_ffdi(GeoPoint(0, 0), grid) is None

    def test_null_cell(self):
        grid = FireRiskGrid(BoundingBox(-34, 150, -33, 151), 1, 2, (None, 2.0))
        assert lookup_ffdi(GeoPoint(-33.5, 150.25), grid) is None
        assert lookup_ffdi(GeoPoint(-33.5, 150.75), grid) == 2.0

    def test_max_edges_inclusive(self):
        grid = FireRiskGrid(BoundingBox(-34, 150, -33, 151), 2, 2,
                            (0.0, 1.0, 2.0, 3.0))
        assert lookup_ffdi(GeoPoint(-33.0, 151.0), grid) == 3.0
        assert lookup_ffdi(GeoPoint(-34.0, 150.0), grid) == 0.0

    def test_random_vs_index_arithmetic(self):
        rng = random.Random(12)
        cells = tuple(rng.uniform(0, 5) for _ in range(100))
        grid = FireRiskGrid(BoundingBox(-34, 150, -33, 151), 10, 10, cells)
        for _ in range(200):
            p = GeoPoint(rng.uniform(-34, -33), rng.uniform(150, 151))
            row = min(9, int((p.lat - (-34.0)) / 0.1))
            col = min(9, int((p.lon - 150.0) / 0.1))
            assert lookup_ffdi(p, grid) == cells[row * 10 + col]


class TestAnnotateContext:
    def test_point_on_poi_and_route(self):
        loc = GeoPoint(-33.5, 150.5)
        pois = [PoiRecord("p1", "fuel", loc)]
        routes = [make_route("r1", [(-33.5, 150.0, 10.0), (-33.5, 151.0, 20.0)])]
        ctx, = annotate_context([DemandPoint(0, loc, "t", "origin")],
                                pois, routes, None)
        assert ctx.dist_poi_m == 0.0
        assert ctx.dist_route_m < 1e-6
        assert ctx.ffdi_delta is None

    def test_empty_poi_layer(self):
        routes = [make_route("r1", [(-33.5, 150.0, 10.0), (-33.5, 151.0, 20.0)])]
        ctx, = annotate_context([DemandPoint(0, GeoPoint(-33.5, 150.5), "t", "origin")],
                                [], routes, None)
        assert ctx.dist_poi_m == math.inf

    def test_no_routes_gives_inf_and_nan(self):
        ctx, = annotate_context([DemandPoint(0, GeoPoint(-33.5, 150.5), "t", "origin")],
                                [], [], None)
        assert ctx.dist_route_m == math.inf
        assert math.isnan(ctx.altitude_m)

    def test_scenario_matches_brute_force(self):
        rng = random.Random(13)
        pois = [PoiRecord(f"p{i}", "fuel",
                          GeoPoint(rng.uniform(-34, -33), rng.uniform(150, 151)))
                for i in range(10)]
        routes = [make_route(f"r{r}",
                             [(rng.uniform(-34, -33), rng.uniform(150, 151),
                               rng.uniform(0, 100)) for _ in range(4)])
                  for r in range(4)]
        cells = tuple(rng.uniform(0, 5) for _ in range(100))
        grid = FireRiskGrid(BoundingBox(-34, 150, -33, 151), 10, 10, cells)
        points = [DemandPoint(i, GeoPoint(rng.uniform(-34, -33),
                                          rng.uniform(150, 151)), "t", "origin")
                  for i in range(50)]
        contexts = annotate_context(points, pois, routes, grid)
        for dp, ctx in zip(points, contexts):
            lat, lon = dp.location.lat, dp.location.lon
            want_poi = min(oracles.haversine_oracle(lat, lon, p.location.lat,
                                                    p.location.lon) for p in pois)
            assert ctx.dist_poi_m == pytest.approx(want_poi)
            want_route = min(
                oracles.dense_projection(lat, lon,
                                         [(v.lat, v.lon) for v in r.polyline],
                                         samples_per_segment=3000)[1]
                for r in routes)
            assert abs(ctx.dist_route_m - want_route) < 2.0
            alt_coords = [(v.lat, v.lon) for r in routes for v in r.polyline]
            alt_values = [a for r in routes for a in r.altitudes]
            want_alt = alt_values[oracles.linear_nearest(alt_coords, lat, lon)[0]]
            assert ctx.altitude_m == want_alt
            assert ctx.ffdi_delta == lookup_ffdi(dp.location, grid)


class TestAdjustParams:
    def test_far_from_everything_is_identity(self):
        cfg = ConstraintConfig()
        ctx = PointContext(100.0, math.inf, math.inf, 0.0)
        assert adjust_params(ctx, cfg) == AdjustedParams(cfg.base_eps_m,
                                                         cfg.base_minpts)

    def test_neutral_config_is_constant(self):
        rng = random.Random(14)
        for _ in range(50):
            ctx = PointContext(rng.uniform(-50, 500),
                               rng.choice([rng.uniform(0, 5000), math.inf]),
                               rng.choice([rng.uniform(0, 5000), math.inf]),
                               rng.choice([None, rng.uniform(0, 5)]))
            assert adjust_params(ctx, NEUTRAL) == AdjustedParams(
                NEUTRAL.base_eps_m, NEUTRAL.base_minpts)

    def test_default_worked_example(self):
        # base_eps 800 * 0.75 = 600; minpts = max(2, ceil(10*0.6*0.8*1.5)) = 8
        cfg = ConstraintConfig()
        ctx = PointContext(altitude_m=2.0, dist_poi_m=50.0, dist_route_m=10.0,
                           ffdi_delta=cfg.ffdi_threshold - 1.0)
        got = adjust_params(ctx, cfg)
        assert got == AdjustedParams(600.0, 8)
        assert math.ceil(10 * 0.6 * 0.8 * 1.5) == 8  # arithmetic cross-check

    def test_clamps_hold_for_extreme_factors(self):
        cfg = ConstraintConfig(eps_factor_poi=0.001, minpts_factor_poi=0.0001,
                               eps_min_m=200.0, eps_max_m=1000.0)
        ctx = PointContext(50.0, 0.0, 0.0, None)
        got = adjust_params(ctx, cfg)
        assert got.eps_m == 200.0
        assert got.minpts == cfg.minpts_min

    def test_invariants_random(self):
        rng = random.Random(15)
        cfg = ConstraintConfig(minpts_factor_flood=3.0, minpts_factor_fire=4.0)
        for _ in range(200):
            ctx = PointContext(rng.uniform(-100, 1000),
                               rng.choice([rng.uniform(0, 2000), math.inf]),
                               rng.choice([rng.uniform(0, 2000), math.inf]),
                               rng.choice([None, rng.uniform(0, 10)]))
            got = adjust_params(ctx, cfg)
            assert cfg.eps_min_m <= got.eps_m <= cfg.eps_max_m
            assert got.minpts >= cfg.minpts_min

    def test_fire_factor_monotone(self):
        ctx = PointContext(100.0, math.inf, math.inf, 5.0)
        prev = 0
        for factor in (1.0, 1.2, 1.5, 2.0, 3.0):
            cfg = ConstraintConfig(minpts_factor_fire=factor)
            got = adjust_params(ctx, cfg)
            assert got.minpts >= prev
            prev = got.minpts

    def test_missing_ffdi_skips_fire_rule(self):
        cfg = ConstraintConfig(minpts_factor_fire=5.0)
        ctx = PointContext(100.0, math.inf, math.inf, None)
        assert adjust_params(ctx, cfg).minpts == cfg.base_minpts

    def test_config_invariants_enforced(self):
        with pytest.raises(ConstraintError):
            ConstraintConfig(base_eps_m=-1)
        with pytest.raises(ConstraintError):
            ConstraintConfig(base_minpts=1)
        with pytest.raises(ConstraintError):
            ConstraintConfig(eps_min_m=900.0, base_eps_m=800.0)
        with pytest.raises(ConstraintError):
            ConstraintConfig(minpts_factor_fire=0.0)


class TestRouteLocator:
    def test_distance_matches_exhaustive_projection(self):
        rng = random.Random(16)
        routes = [make_route(f"r{r}",
                             [(rng.uniform(-34, -33), rng.uniform(150, 151),
                               rng.uniform(0, 100)) for _ in range(5)])
                  for r in range(6)]
        locator = RouteLocator(routes)
        from evsite.geo import project_to_polyline
        for _ in range(100):
            p = GeoPoint(rng.uniform(-34.1, -32.9), rng.uniform(149.9, 151.1))
            _, got = locator.distance_to(p)
            want = min(project_to_polyline(p, r.polyline)[1] for r in routes)
            assert got == pytest.approx(want, abs=1e-9)
