"""Per-point context (altitude, POI/route proximity, fire risk) and the
dynamic per-point adjustment of the clustering radius and density threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geo import GeoPoint, build_index, haversine_distance, project_to_polyline, METERS_PER_DEG
from .ingest import DemandPoint, FireRiskGrid, PoiRecord, RouteRecord


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class PointContext:
    altitude_m: float           # nan when no route exists
    dist_poi_m: float           # inf when no POI
    dist_route_m: float         # inf when no route
    ffdi_delta: float | None    # None = missing


@dataclass(frozen=True)
class ConstraintConfig:
    base_eps_m: float = 800.0
    base_minpts: int = 10
    poi_near_m: float = 300.0
    route_near_m: float = 200.0
    eps_factor_poi: float = 0.75
    minpts_factor_poi: float = 0.6
    minpts_factor_route: float = 0.8
    flood_alt_m: float = 5.0
    minpts_factor_flood: float = 1.5
    ffdi_threshold: float = 2.0
    minpts_factor_fire: float = 1.5
    eps_min_m: float = 100.0
    eps_max_m: float = 2000.0
    minpts_min: int = 2

    def __post_init__(self):
        if self.base_eps_m <= 0:
            raise ConstraintError("base_eps_m must be > 0")
        if not self.base_minpts >= self.minpts_min >= 2:
            raise ConstraintError("need base_minpts >= minpts_min >= 2")
        if not self.eps_min_m <= self.base_eps_m <= self.eps_max_m:
            raise ConstraintError("need eps_min_m <= base_eps_m <= eps_max_m")
        for name in ("eps_factor_poi", "minpts_factor_poi", "minpts_factor_route",
                     "minpts_factor_flood", "minpts_factor_fire"):
            if getattr(self, name) <= 0:
                raise ConstraintError(f"{name} must be > 0")

    def is_neutral(self) -> bool:
        return (self.eps_factor_poi == 1.0 and self.minpts_factor_poi == 1.0
                and self.minpts_factor_route == 1.0
                and self.minpts_factor_flood == 1.0
                and self.minpts_factor_fire == 1.0)


@dataclass(frozen=True)
class AdjustedParams:
    eps_m: float
    minpts: int


def estimate_altitude(p: GeoPoint, routes: list[RouteRecord]) -> float:
    """Altitude of the nearest route vertex; ties by smallest (route_id, index)."""
    best = None
    for route in sorted(routes, key=lambda r: r.route_id):
        for i, v in enumerate(route.polyline):
            d = haversine_distance(p, v)
            if best is None or d < best[0]:
                best = (d, route.altitudes[i])
    if best is None:
        raise ConstraintError("no altitude source")
    return best[1]


def lookup_ffdi(p: GeoPoint, grid: FireRiskGrid) -> float | None:
    """Value of the grid cell containing p; None outside the bbox or for null cells.

    Cells are half-open with the max edge inclusive; row 0 sits at min_lat.
    """
    box = grid.bbox
    if not box.contains(p):
        return None
    cell_h = (box.max_lat - box.min_lat) / grid.n_rows
    cell_w = (box.max_lon - box.min_lon) / grid.n_cols
    row = grid.n_rows - 1 if cell_h == 0 else min(
        grid.n_rows - 1, int((p.lat - box.min_lat) / cell_h))
    col = grid.n_cols - 1 if cell_w == 0 else min(
        grid.n_cols - 1, int((p.lon - box.min_lon) / cell_w))
    return grid.cells[row * grid.n_cols + col]


class RouteLocator:
    """Exact nearest-route queries accelerated by a grid index over vertices.

    A segment can only beat a candidate distance d if one of its endpoints
    lies within d plus the longest segment length, which bounds the vertex
    search radius.
    """

    def __init__(self, routes: list[RouteRecord]):
        self.routes = sorted(routes, key=lambda r: r.route_id)
        self._vertices: list[GeoPoint] = []
        self._altitudes: list[float] = []
        self._segments: list[list[tuple[GeoPoint, GeoPoint]]] = []  # per vertex id
        self.max_seg_m = 0.0
        self._route_ids: list[str] = []
        for route in self.routes:
            for i, v in enumerate(route.polyline):
                segs = []
                if i + 1 < len(route.polyline):
                    seg = (v, route.polyline[i + 1])
                    segs.append(seg)
                    self.max_seg_m = max(self.max_seg_m, haversine_distance(*seg))
                self._vertices.append(v)
                self._altitudes.append(route.altitudes[i])
                self._segments.append(segs)
                self._route_ids.append(route.route_id)
        cell = max(self.max_seg_m, 500.0) / METERS_PER_DEG
        self._index = build_index(self._vertices, cell) if self._vertices else None

    def __bool__(self) -> bool:
        return self._index is not None

    def altitude_at(self, p: GeoPoint) -> float:
        if self._index is None:
            raise ConstraintError("no altitude source")
        vid, _ = self._index.nearest(p)
        return self._altitudes[vid]

    def locate(self, p: GeoPoint) -> tuple[GeoPoint, float, str]:
        """(closest on-route point, distance, route id); inf and "" when no routes."""
        if self._index is None:
            return p, math.inf, ""
        vid, d_vertex = self._index.nearest(p)
        best_pt, best_d, best_id = self._vertices[vid], d_vertex, self._route_ids[vid]
        for cand in self._index.neighbors_within(p, d_vertex + self.max_seg_m):
            for seg in self._segments[cand]:
                pt, d = project_to_polyline(p, seg)
                if d < best_d or (d == best_d and self._route_ids[cand] < best_id):
                    best_pt, best_d, best_id = pt, d, self._route_ids[cand]
        return best_pt, best_d, best_id

    def distance_to(self, p: GeoPoint) -> tuple[GeoPoint, float]:
        """(closest on-route point, distance); inf distance when no routes."""
        pt, d, _ = self.locate(p)
        return pt, d


def annotate_context(points: list[DemandPoint], pois: list[PoiRecord],
                     routes: list[RouteRecord],
                     grid: FireRiskGrid | None) -> list[PointContext]:
    """Context for every demand point, parallel to the input list."""
    poi_index = build_index([p.location for p in pois], 0.01) if pois else None
    locator = RouteLocator(routes)
    out = []
    for dp in points:
        if poi_index is not None:
            _, dist_poi = poi_index.nearest(dp.location)
        else:
            dist_poi = math.inf
        _, dist_route = locator.distance_to(dp.location)
        altitude = locator.altitude_at(dp.location) if locator else math.nan
        ffdi = lookup_ffdi(dp.location, grid) if grid is not None else None
        out.append(PointContext(altitude, dist_poi, dist_route, ffdi))
    return out


def adjust_params(ctx: PointContext, cfg: ConstraintConfig) -> AdjustedParams:
    """Threshold-gated multiplicative adjustment with clamps.

    POI or route proximity eases cluster formation (tighter radius, lower
    density threshold); flood-prone altitude and high fire-risk cells demand
    more evidence (higher density threshold).
    """
    eps = cfg.base_eps_m
    if ctx.dist_poi_m <= cfg.poi_near_m:
        eps *= cfg.eps_factor_poi
    m = float(cfg.base_minpts)
    if ctx.dist_poi_m <= cfg.poi_near_m:
        m *= cfg.minpts_factor_poi
    if ctx.dist_route_m <= cfg.route_near_m:
        m *= cfg.minpts_factor_route
    if not math.isnan(ctx.altitude_m) and ctx.altitude_m < cfg.flood_alt_m:
        m *= cfg.minpts_factor_flood
    if ctx.ffdi_delta is not None and ctx.ffdi_delta >= cfg.ffdi_threshold:
        m *= cfg.minpts_factor_fire
    eps = min(cfg.eps_max_m, max(cfg.eps_min_m, eps))
    minpts = max(cfg.minpts_min, math.ceil(m))
    return AdjustedParams(eps, minpts)
