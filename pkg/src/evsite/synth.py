"""Seeded synthetic scenarios: all six input layers plus a ground-truth manifest.

LGAs tile a bounding box in a rows x cols rectangular grid; demand hotspots
are planted inside each LGA with Gaussian scatter, and the manifest records
their true centers so recovery is checkable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geo import GeoPoint, METERS_PER_DEG, BoundingBox, haversine_distance
from .ingest import (
    FireRiskGrid,
    LgaRecord,
    MultiPolygon,
    PoiRecord,
    Polygon,
    RouteRecord,
    StationRecord,
    TripRecord,
    save_fire_grid,
    save_lgas,
    save_pois,
    save_routes,
    save_stations,
    save_trips,
)
from .rng import Rng

POI_CYCLE = ("fuel", "fast_food", "tourism")
STATION_CYCLE = ("existing_fast", "existing_destination", "approved")


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int = 0
    bbox: tuple[float, float, float, float] = (-35.0, 149.0, -33.0, 151.0)  # min_lat, min_lon, max_lat, max_lon
    lga_rows: int = 2
    lga_cols: int = 2
    n_hotspots_per_lga: int = 3
    points_per_hotspot_min: int = 40
    points_per_hotspot_max: int = 40
    hotspot_sigma_m: float = 150.0
    background_noise_points: int = 200
    poi_per_hotspot_prob: float = 0.5
    n_stations_per_lga: int = 2
    route_spacing_deg: float = 0.02
    route_vertex_step_deg: float = 0.02
    altitude_base_m: float = 50.0
    altitude_amplitude_m: float = 40.0
    ffdi_rows: int = 20
    ffdi_cols: int = 20
    ffdi_max: float = 4.0
    ffdi_missing_prob: float = 0.05

    def __post_init__(self):
        if self.lga_rows < 1 or self.lga_cols < 1:
            raise ValueError("need at least a 1x1 LGA grid")
        if self.points_per_hotspot_min > self.points_per_hotspot_max:
            raise ValueError("points_per_hotspot range inverted")
        if not 0.0 <= self.poi_per_hotspot_prob <= 1.0:
            raise ValueError("poi_per_hotspot_prob must be in [0, 1]")

    @staticmethod
    def from_dict(doc: dict) -> "ScenarioSpec":
        known = set(ScenarioSpec.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown scenario spec keys: {sorted(unknown)}")
        if "bbox" in doc:
            doc = {**doc, "bbox": tuple(doc["bbox"])}
        return ScenarioSpec(**doc)


@dataclass
class Hotspot:
    lga_name: str
    center: GeoPoint
    planted_points: int
    has_poi: bool


@dataclass
class ScenarioManifest:
    seed: int
    hotspots: list[Hotspot]
    layer_counts: dict[str, int]

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "hotspots": [{"lga_name": h.lga_name,
                          "center": [h.center.lat, h.center.lon],
                          "planted_points": h.planted_points,
                          "has_poi": h.has_poi}
                         for h in self.hotspots],
            "layer_counts": dict(self.layer_counts),
        }


def _altitude_at(spec: ScenarioSpec, p: GeoPoint) -> float:
    min_lat, min_lon, max_lat, max_lon = spec.bbox
    u = (p.lat - min_lat) / max(1e-12, max_lat - min_lat)
    v = (p.lon - min_lon) / max(1e-12, max_lon - min_lon)
    alt = (spec.altitude_base_m
           + spec.altitude_amplitude_m * math.sin(2 * math.pi * u)
           + spec.altitude_amplitude_m * math.cos(2 * math.pi * v))
    return max(-100.0, min(3000.0, alt))


def _lga_tiles(spec: ScenarioSpec) -> list[tuple[str, BoundingBox]]:
    min_lat, min_lon, max_lat, max_lon = spec.bbox
    dlat = (max_lat - min_lat) / spec.lga_rows
    dlon = (max_lon - min_lon) / spec.lga_cols
    tiles = []
    for r in range(spec.lga_rows):
        for c in range(spec.lga_cols):
            name = f"LGA-{r}{c}"
            tiles.append((name, BoundingBox(min_lat + r * dlat, min_lon + c * dlon,
                                            min_lat + (r + 1) * dlat,
                                            min_lon + (c + 1) * dlon)))
    return tiles


def _tile_polygon(box: BoundingBox) -> MultiPolygon:
    ring = (GeoPoint(box.min_lat, box.min_lon), GeoPoint(box.min_lat, box.max_lon),
            GeoPoint(box.max_lat, box.max_lon), GeoPoint(box.max_lat, box.min_lon),
            GeoPoint(box.min_lat, box.min_lon))
    return MultiPolygon((Polygon(ring),))


def _hotspot_centers(spec: ScenarioSpec, tile: BoundingBox, rng: Rng) -> list[GeoPoint]:
    """Well-separated anchor positions inside the tile with mild jitter."""
    anchors = [(0.25, 0.25), (0.75, 0.5), (0.3, 0.8), (0.7, 0.15), (0.5, 0.65),
               (0.15, 0.55), (0.85, 0.85), (0.45, 0.1), (0.6, 0.35), (0.2, 0.9)]
    h = tile.max_lat - tile.min_lat
    w = tile.max_lon - tile.min_lon
    centers = []
    for i in range(spec.n_hotspots_per_lga):
        fy, fx = anchors[i % len(anchors)]
        jitter = 0.02
        centers.append(GeoPoint(
            tile.min_lat + h * (fy + rng.uniform(-jitter, jitter)),
            tile.min_lon + w * (fx + rng.uniform(-jitter, jitter))))
    return centers


def _scatter(rng: Rng, center: GeoPoint, sigma_m: float) -> GeoPoint:
    dlat = rng.normal(0.0, sigma_m) / METERS_PER_DEG
    dlon = rng.normal(0.0, sigma_m) / (METERS_PER_DEG * math.cos(math.radians(center.lat)))
    return GeoPoint(center.lat + dlat, center.lon + dlon)


def generate(spec: ScenarioSpec, out_dir) -> ScenarioManifest:
    """Write trips, stations, LGAs, POIs, routes, and the fire grid plus
    manifest.json into out_dir; byte-identical for identical specs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = Rng(spec.seed)
    min_lat, min_lon, max_lat, max_lon = spec.bbox
    tiles = _lga_tiles(spec)

    lgas = [LgaRecord(name, _tile_polygon(box)) for name, box in tiles]

    hotspots: list[Hotspot] = []
    trips: list[TripRecord] = []
    pois: list[PoiRecord] = []
    stations: list[StationRecord] = []
    trip_seq = 0
    for name, box in tiles:
        for center in _hotspot_centers(spec, box, rng):
            n_points = rng.randint(spec.points_per_hotspot_min,
                                   spec.points_per_hotspot_max)
            n_trips = n_points // 2
            for _ in range(n_trips):
                a = _scatter(rng, center, spec.hotspot_sigma_m)
                b = _scatter(rng, center, spec.hotspot_sigma_m)
                t0 = 1_600_000_000 + trip_seq * 10_000
                trips.append(TripRecord(f"trip-{trip_seq:06d}",
                                        ((t0, a), (t0 + 600, b))))
                trip_seq += 1
            has_poi = rng.random() < spec.poi_per_hotspot_prob
            if has_poi:
                pois.append(PoiRecord(f"poi-{len(pois):04d}",
                                      POI_CYCLE[len(pois) % len(POI_CYCLE)], center))
            hotspots.append(Hotspot(name, center, 2 * n_trips, has_poi))
        # stations sit near tile corners, far from the planted hotspot anchors
        h = box.max_lat - box.min_lat
        w = box.max_lon - box.min_lon
        for k in range(spec.n_stations_per_lga):
            fy, fx = ((0.05, 0.05), (0.95, 0.95), (0.05, 0.95), (0.95, 0.05))[k % 4]
            stations.append(StationRecord(
                f"station-{len(stations):04d}",
                STATION_CYCLE[len(stations) % len(STATION_CYCLE)],
                GeoPoint(box.min_lat + h * fy, box.min_lon + w * fx)))

    for _ in range(spec.background_noise_points // 2):
        a = GeoPoint(rng.uniform(min_lat, max_lat), rng.uniform(min_lon, max_lon))
        b = GeoPoint(rng.uniform(min_lat, max_lat), rng.uniform(min_lon, max_lon))
        t0 = 1_600_000_000 + trip_seq * 100_000
        # duration long enough that the implied speed survives cleaning
        dt = max(600, int(haversine_distance(a, b) / 25.0) + 1)
        trips.append(TripRecord(f"trip-{trip_seq:06d}", ((t0, a), (t0 + dt, b))))
        trip_seq += 1

    routes = _build_routes(spec, hotspots)
    grid = _build_fire_grid(spec, rng)

    save_trips(out / "trips.csv", trips)
    save_lgas(out / "lgas.geojson", lgas)
    save_pois(out / "pois.geojson", pois)
    save_stations(out / "stations.geojson", stations)
    save_routes(out / "routes.geojson", routes)
    save_fire_grid(out / "fire_grid.json", grid)

    manifest = ScenarioManifest(
        seed=spec.seed, hotspots=hotspots,
        layer_counts={"trips": len(trips), "lgas": len(lgas), "pois": len(pois),
                      "stations": len(stations), "routes": len(routes),
                      "fire_grid_cells": len(grid.cells)})
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest.as_dict(), f, sort_keys=True, separators=(",", ":"))
        f.write("\n")
    return manifest


def _polyline_with_altitudes(spec: ScenarioSpec, points: list[GeoPoint],
                             route_id: str) -> RouteRecord:
    return RouteRecord(route_id, tuple(points),
                       tuple(_altitude_at(spec, p) for p in points))


def _build_routes(spec: ScenarioSpec, hotspots: list[Hotspot]) -> list[RouteRecord]:
    """A west-east line grid across the bbox plus one short line through each
    hotspot center, so every hotspot has a nearby road."""
    min_lat, min_lon, max_lat, max_lon = spec.bbox
    routes = []
    lat = min_lat
    k = 0
    while lat <= max_lat + 1e-12:
        points = []
        lon = min_lon
        while lon <= max_lon + 1e-12:
            points.append(GeoPoint(round(lat, 9), round(min(lon, max_lon), 9)))
            lon += spec.route_vertex_step_deg
        if len(points) >= 2:
            routes.append(_polyline_with_altitudes(spec, points, f"grid-{k:04d}"))
        k += 1
        lat += spec.route_spacing_deg
    half = 0.05
    for i, h in enumerate(hotspots):
        lon0 = max(min_lon, h.center.lon - half)
        lon1 = min(max_lon, h.center.lon + half)
        points = [GeoPoint(h.center.lat, lon0), h.center, GeoPoint(h.center.lat, lon1)]
        routes.append(_polyline_with_altitudes(spec, points, f"spur-{i:04d}"))
    return routes


def _build_fire_grid(spec: ScenarioSpec, rng: Rng) -> FireRiskGrid:
    min_lat, min_lon, max_lat, max_lon = spec.bbox
    cells: list[float | None] = []
    for r in range(spec.ffdi_rows):
        for c in range(spec.ffdi_cols):
            if rng.random() < spec.ffdi_missing_prob:
                cells.append(None)
            else:
                u = (r + 0.5) / spec.ffdi_rows
                v = (c + 0.5) / spec.ffdi_cols
                value = spec.ffdi_max * (0.5 + 0.5 * math.sin(math.pi * u)
                                         * math.cos(math.pi * v))
                cells.append(round(value, 6))
    return FireRiskGrid(BoundingBox(min_lat, min_lon, max_lat, max_lon),
                        spec.ffdi_rows, spec.ffdi_cols, tuple(cells))
