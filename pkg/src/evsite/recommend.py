"""Turn clusters into station proposals: locate, snap, deduplicate, classify, flag risk."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .cluster import NOISE, LgaClusterResult
from .constraints import ConstraintConfig, PointContext, RouteLocator, lookup_ffdi
from .geo import GeoPoint, haversine_distance
from .ingest import DemandPoint, FireRiskGrid, PoiRecord, RouteRecord, StationRecord

UNSNAPPED = "unsnapped"


class RecommendError(ValueError):
    pass


@dataclass(frozen=True)
class Recommendation:
    rec_id: str
    location: GeoPoint
    lga_name: str
    charger_kind: str            # fast | destination
    cluster_size: int
    snap_target: str             # "poi:<id>" | "route:<id>" | "unsnapped"
    snap_dist_m: float
    altitude_m: float
    ffdi_delta: float | None
    flood_flag: bool
    fire_flag: bool | None       # None = unknown (missing fire-risk value)
    cluster_span_m: float


def cluster_location(member_points: list[GeoPoint]) -> GeoPoint:
    """Spherical mean of the members; medoid fallback on degeneracy."""
    if not member_points:
        raise RecommendError("empty cluster")
    if len(member_points) == 1:
        return member_points[0]
    x = y = z = 0.0
    for p in member_points:
        lat = math.radians(p.lat)
        lon = math.radians(p.lon)
        x += math.cos(lat) * math.cos(lon)
        y += math.cos(lat) * math.sin(lon)
        z += math.sin(lat)
    n = len(member_points)
    x, y, z = x / n, y / n, z / n
    norm = math.sqrt(x * x + y * y + z * z)
    if norm < 1e-9:
        # antipodal degeneracy: medoid, ties by position
        best = min(range(n), key=lambda i: (
            sum(haversine_distance(member_points[i], q) for q in member_points), i))
        return member_points[best]
    return GeoPoint(math.degrees(math.asin(z / norm)),
                    math.degrees(math.atan2(y, x)))


def snap(location: GeoPoint, pois: list[PoiRecord], routes: list[RouteRecord],
         poi_snap_m: float, route_snap_m: float,
         locator: RouteLocator | None = None) -> tuple[GeoPoint, str, float]:
    """Nearest POI within poi_snap_m, else nearest route projection within
    route_snap_m, else unsnapped at the original location."""
    if poi_snap_m <= 0 or route_snap_m <= 0:
        raise RecommendError("snap radii must be > 0")
    best_poi = None
    for poi in sorted(pois, key=lambda p: p.poi_id):
        d = haversine_distance(location, poi.location)
        if d <= poi_snap_m and (best_poi is None or d < best_poi[0]):
            best_poi = (d, poi)
    if best_poi is not None:
        d, poi = best_poi
        return poi.location, f"poi:{poi.poi_id}", d
    if locator is None:
        locator = RouteLocator(routes)
    pt, d, route_id = locator.locate(location)
    if d <= route_snap_m:
        return pt, f"route:{route_id}", d
    return location, UNSNAPPED, math.inf


def dedup(recs: list[Recommendation], stations: list[StationRecord],
          min_sep_m: float) -> list[Recommendation]:
    """Drop recommendations within min_sep_m (inclusive) of any station."""
    if min_sep_m < 0:
        raise RecommendError("min_sep_m must be >= 0")
    kept = [r for r in recs
            if all(haversine_distance(r.location, s.location) > min_sep_m
                   for s in stations)]
    return sorted(kept, key=lambda r: r.rec_id)


def classify_charger(rec: Recommendation, pois: list[PoiRecord],
                     corridor_span_m: float) -> str:
    """Fast for fuel-POI anchors and long corridor clusters, destination otherwise."""
    if rec.snap_target.startswith("poi:"):
        poi_id = rec.snap_target[4:]
        categories = {p.poi_id: p.category for p in pois}
        if categories.get(poi_id) == "fuel":
            return "fast"
        return "destination"
    if rec.snap_target.startswith("route:") and rec.cluster_span_m >= corridor_span_m:
        return "fast"
    return "destination"


def annotate_risk(rec: Recommendation, flood_alt_m: float,
                  ffdi_threshold: float) -> Recommendation:
    fire = None if rec.ffdi_delta is None else rec.ffdi_delta >= ffdi_threshold
    return replace(rec, flood_flag=rec.altitude_m < flood_alt_m, fire_flag=fire)


def propose_all(cluster_results: list[LgaClusterResult],
                buckets: dict[str, list[DemandPoint]],
                pois: list[PoiRecord], routes: list[RouteRecord],
                grid: FireRiskGrid | None, cfg: ConstraintConfig,
                poi_snap_m: float, route_snap_m: float,
                corridor_span_m: float) -> list[Recommendation]:
    """One annotated, classified recommendation per cluster, before dedup."""
    locator = RouteLocator(routes)
    recs = []
    for result in cluster_results:
        points = buckets[result.lga_name]
        for c in range(result.assignment.cluster_count):
            members = [points[i].location
                       for i, lab in enumerate(result.assignment.labels) if lab == c]
            center = cluster_location(members)
            loc, target, dist = snap(center, pois, routes, poi_snap_m,
                                     route_snap_m, locator=locator)
            span = max(haversine_distance(center, m) for m in members)
            altitude = locator.altitude_at(loc) if locator else math.nan
            ffdi = lookup_ffdi(loc, grid) if grid is not None else None
            rec = Recommendation(
                rec_id=f"{result.lga_name}-{c}", location=loc,
                lga_name=result.lga_name, charger_kind="destination",
                cluster_size=len(members), snap_target=target, snap_dist_m=dist,
                altitude_m=altitude, ffdi_delta=ffdi,
                flood_flag=False, fire_flag=None, cluster_span_m=span)
            rec = annotate_risk(rec, cfg.flood_alt_m, cfg.ffdi_threshold)
            rec = replace(rec, charger_kind=classify_charger(rec, pois, corridor_span_m))
            recs.append(rec)
    return sorted(recs, key=lambda r: r.rec_id)


def recommend_all(cluster_results: list[LgaClusterResult],
                  buckets: dict[str, list[DemandPoint]],
                  pois: list[PoiRecord], routes: list[RouteRecord],
                  grid: FireRiskGrid | None, stations: list[StationRecord],
                  cfg: ConstraintConfig, poi_snap_m: float, route_snap_m: float,
                  corridor_span_m: float, min_sep_m: float) -> list[Recommendation]:
    recs = propose_all(cluster_results, buckets, pois, routes, grid, cfg,
                       poi_snap_m, route_snap_m, corridor_span_m)
    return dedup(recs, [s for s in stations], min_sep_m)
