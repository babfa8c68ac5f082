"""Load, validate, and clean the six input layers; extract demand points; assign LGAs."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .geo import (
    BoundingBox,
    GeoError,
    GeoPoint,
    MultiPolygon,
    Polygon,
    bbox_of_rings,
    haversine_distance,
    point_in_polygon,
)

STATION_KINDS = ("existing_fast", "existing_destination", "approved")
POI_CATEGORIES = ("fast_food", "fuel", "tourism")

TRIPS_CSV_HEADER = ["trip_id", "timestamp", "lat", "lon"]


class IngestError(ValueError):
    """Schema or content violation in an input file."""


@dataclass(frozen=True)
class TripRecord:
    trip_id: str
    points: tuple[tuple[int, GeoPoint], ...]  # (epoch seconds, location)

    def __post_init__(self):
        if len(self.points) < 2:
            raise IngestError(f"trip {self.trip_id}: needs >= 2 points")
        for (ta, pa), (tb, pb) in zip(self.points, self.points[1:]):
            # strictly increasing, except exact duplicate fixes, which the
            # cleaning pass removes
            if tb < ta or (tb == ta and pb != pa):
                raise IngestError(
                    f"trip {self.trip_id}: timestamps not strictly increasing")


@dataclass(frozen=True)
class StationRecord:
    station_id: str
    kind: str
    location: GeoPoint

    def __post_init__(self):
        if self.kind not in STATION_KINDS:
            raise IngestError(f"station {self.station_id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class PoiRecord:
    poi_id: str
    category: str
    location: GeoPoint

    def __post_init__(self):
        if self.category not in POI_CATEGORIES:
            raise IngestError(f"POI {self.poi_id}: unknown category {self.category!r}")


@dataclass(frozen=True)
class RouteRecord:
    route_id: str
    polyline: tuple[GeoPoint, ...]
    altitudes: tuple[float, ...]

    def __post_init__(self):
        if len(self.polyline) < 2:
            raise IngestError(f"route {self.route_id}: needs >= 2 vertices")
        if len(self.altitudes) != len(self.polyline):
            raise IngestError(f"route {self.route_id}: altitudes length mismatch")
        for a in self.altitudes:
            if not math.isfinite(a) or not -100.0 <= a <= 3000.0:
                raise IngestError(f"route {self.route_id}: altitude {a} out of range")


@dataclass(frozen=True)
class LgaRecord:
    lga_name: str
    boundary: MultiPolygon

    def bbox(self) -> BoundingBox:
        return bbox_of_rings([r for p in self.boundary.polygons for r in p.rings()])


@dataclass(frozen=True)
class FireRiskGrid:
    bbox: BoundingBox
    n_rows: int
    n_cols: int
    cells: tuple[float | None, ...]  # row-major, row 0 at min_lat

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise IngestError("fire grid needs n_rows, n_cols >= 1")
        if self.n_rows * self.n_cols != len(self.cells):
            raise IngestError("fire grid cell count != n_rows * n_cols")


@dataclass(frozen=True)
class DemandPoint:
    point_id: int
    location: GeoPoint
    source_trip: str
    kind: str  # origin | destination | dwell


@dataclass
class CleaningSummary:
    duplicate_fixes_removed: int = 0
    speed_fixes_removed: int = 0
    trips_dropped: int = 0

    def as_dict(self) -> dict:
        return {
            "duplicate_fixes_removed": self.duplicate_fixes_removed,
            "speed_fixes_removed": self.speed_fixes_removed,
            "trips_dropped": self.trips_dropped,
        }


# ---------------------------------------------------------------------------
# trips

def load_trips(path, format: str = "csv") -> tuple[list[TripRecord], list[str]]:
    """Parse trips; returns (records, malformed-row messages).

    Malformed rows are dropped and reported; more than 50% malformed is a
    corrupt-input error.
    """
    path = Path(path)
    if format == "csv":
        rows, bad = _read_trip_csv(path)
    elif format == "geojson":
        rows, bad = _read_trip_geojson(path)
    else:
        raise IngestError(f"unknown trips format {format!r}")

    total = len(rows) + len(bad)
    if total and len(bad) > total / 2:
        raise IngestError(
            f"corrupt input {path}: {len(bad)} of {total} rows malformed")

    by_trip: dict[str, list[tuple[int, GeoPoint]]] = {}
    for trip_id, ts, pt in rows:
        by_trip.setdefault(trip_id, []).append((ts, pt))
    trips = []
    for trip_id in sorted(by_trip):
        pts = sorted(by_trip[trip_id], key=lambda tp: (tp[0], tp[1].lat, tp[1].lon))
        if len(pts) < 2:
            bad.append(f"trip {trip_id}: fewer than 2 valid points, dropped")
            continue
        try:
            trips.append(TripRecord(trip_id, tuple(pts)))
        except IngestError as e:
            bad.append(f"{e}, dropped")
    return trips, bad


def _read_trip_csv(path: Path):
    rows, bad = [], []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TRIPS_CSV_HEADER:
            raise IngestError(f"{path}: expected header {TRIPS_CSV_HEADER}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                if len(row) != 4:
                    raise ValueError(f"expected 4 columns, got {len(row)}")
                trip_id, ts, lat, lon = row
                rows.append((trip_id, int(ts), GeoPoint(float(lat), float(lon))))
            except (ValueError, GeoError) as e:
                bad.append(f"{path}:{lineno}: {e}")
    return rows, bad


def _read_trip_geojson(path: Path):
    doc = _read_feature_collection(path)
    rows, bad = [], []
    for idx, feat in enumerate(doc["features"]):
        try:
            props = feat.get("properties") or {}
            trip_id = str(props["trip_id"])
            timestamps = props["timestamps"]
            geom = feat["geometry"]
            if geom["type"] != "LineString":
                raise ValueError(f"expected LineString, got {geom['type']}")
            coords = geom["coordinates"]
            if len(coords) != len(timestamps):
                raise ValueError("timestamps length != coordinate count")
            for ts, (lon, lat) in zip(timestamps, coords):
                rows.append((trip_id, int(ts), GeoPoint(float(lat), float(lon))))
        except (KeyError, ValueError, TypeError, GeoError) as e:
            bad.append(f"{path}: feature {idx}: {e}")
    return rows, bad


def save_trips(path, trips: list[TripRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRIPS_CSV_HEADER)
        for trip in trips:
            for ts, pt in trip.points:
                w.writerow([trip.trip_id, ts, repr(pt.lat), repr(pt.lon)])


def clean_trips(trips: list[TripRecord],
                max_speed_mps: float) -> tuple[list[TripRecord], CleaningSummary]:
    """Drop duplicate consecutive fixes and physically implausible jumps."""
    if max_speed_mps <= 0:
        raise IngestError("max_speed_mps must be > 0")
    summary = CleaningSummary()
    out = []
    for trip in trips:
        kept: list[tuple[int, GeoPoint]] = []
        for ts, pt in trip.points:
            if kept:
                prev_ts, prev_pt = kept[-1]
                if ts == prev_ts and pt == prev_pt:
                    summary.duplicate_fixes_removed += 1
                    continue
                dt = ts - prev_ts
                if dt <= 0 or haversine_distance(prev_pt, pt) / dt > max_speed_mps:
                    summary.speed_fixes_removed += 1
                    continue
            kept.append((ts, pt))
        if len(kept) < 2:
            summary.trips_dropped += 1
        else:
            out.append(TripRecord(trip.trip_id, tuple(kept)))
    return out, summary


def extract_demand_points(trips: list[TripRecord], dwell_radius_m: float,
                          dwell_min_s: float) -> list[DemandPoint]:
    """Origin, destination, and stay-point centroids for every trip.

    A stay is a maximal subsequence whose points all lie within dwell_radius_m
    of the subsequence's first point and which spans at least dwell_min_s.
    Ids are dense 0..n-1 in (trip_id, timestamp) order.
    """
    if dwell_radius_m <= 0 or dwell_min_s <= 0:
        raise IngestError("dwell parameters must be > 0")
    raw: list[tuple[str, int, int, GeoPoint, str]] = []  # sort keys + payload
    for trip in trips:
        pts = trip.points
        raw.append((trip.trip_id, pts[0][0], 0, pts[0][1], "origin"))
        raw.append((trip.trip_id, pts[-1][0], 2, pts[-1][1], "destination"))
        i = 0
        while i < len(pts):
            j = i
            while j + 1 < len(pts) and haversine_distance(pts[i][1], pts[j + 1][1]) <= dwell_radius_m:
                j += 1
            if pts[j][0] - pts[i][0] >= dwell_min_s:
                lat = sum(p.lat for _, p in pts[i:j + 1]) / (j - i + 1)
                lon = sum(p.lon for _, p in pts[i:j + 1]) / (j - i + 1)
                raw.append((trip.trip_id, pts[i][0], 1, GeoPoint(lat, lon), "dwell"))
            i = j + 1
    raw.sort(key=lambda r: (r[0], r[1], r[2]))
    return [DemandPoint(i, loc, trip_id, kind)
            for i, (trip_id, _, _, loc, kind) in enumerate(raw)]


# ---------------------------------------------------------------------------
# GeoJSON layers

def _read_feature_collection(path) -> dict:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("type") != "FeatureCollection" or "features" not in doc:
        raise IngestError(f"{path}: not a GeoJSON FeatureCollection")
    return doc


def _feature_point(feat, where: str) -> GeoPoint:
    geom = feat.get("geometry") or {}
    if geom.get("type") != "Point":
        raise IngestError(f"{where}: geometry must be Point")
    lon, lat = geom["coordinates"][:2]
    try:
        return GeoPoint(float(lat), float(lon))
    except GeoError as e:
        raise IngestError(f"{where}: {e}") from e


def _prop(feat, key: str, where: str):
    props = feat.get("properties") or {}
    if key not in props:
        raise IngestError(f"{where}: missing property {key!r}")
    return props[key]


def _ring_from_coords(coords, where: str) -> tuple[GeoPoint, ...]:
    try:
        ring = tuple(GeoPoint(float(lat), float(lon)) for lon, lat in coords)
    except (GeoError, ValueError, TypeError) as e:
        raise IngestError(f"{where}: bad ring coordinate: {e}") from e
    return ring


def _polygon_from_coords(coords, where: str) -> Polygon:
    if not coords:
        raise IngestError(f"{where}: empty polygon")
    try:
        return Polygon(_ring_from_coords(coords[0], where),
                       tuple(_ring_from_coords(r, where) for r in coords[1:]))
    except GeoError as e:
        raise IngestError(f"{where}: {e}") from e


def load_lgas(path) -> list[LgaRecord]:
    doc = _read_feature_collection(path)
    records = []
    seen = set()
    for idx, feat in enumerate(doc["features"]):
        where = f"{path}: feature {idx}"
        name = str(_prop(feat, "lga_name", where))
        if name in seen:
            raise IngestError(f"{where}: duplicate lga_name {name!r}")
        seen.add(name)
        geom = feat.get("geometry") or {}
        if geom.get("type") == "Polygon":
            polys = (_polygon_from_coords(geom["coordinates"], where),)
        elif geom.get("type") == "MultiPolygon":
            polys = tuple(_polygon_from_coords(c, where) for c in geom["coordinates"])
        else:
            raise IngestError(f"{where}: geometry must be Polygon or MultiPolygon")
        records.append(LgaRecord(name, MultiPolygon(polys)))
    return records


def load_pois(path) -> list[PoiRecord]:
    doc = _read_feature_collection(path)
    records = []
    for idx, feat in enumerate(doc["features"]):
        where = f"{path}: feature {idx}"
        poi_id = str(_prop(feat, "poi_id", where))
        category = str(_prop(feat, "category", where))
        location = _feature_point(feat, where)
        try:
            records.append(PoiRecord(poi_id, category, location))
        except IngestError as e:
            raise IngestError(f"{where}: {e}") from e
    return records


def load_stations(path) -> list[StationRecord]:
    doc = _read_feature_collection(path)
    records = []
    for idx, feat in enumerate(doc["features"]):
        where = f"{path}: feature {idx}"
        station_id = str(_prop(feat, "station_id", where))
        kind = str(_prop(feat, "kind", where))
        location = _feature_point(feat, where)
        try:
            records.append(StationRecord(station_id, kind, location))
        except IngestError as e:
            raise IngestError(f"{where}: {e}") from e
    return records


def load_routes(path) -> list[RouteRecord]:
    doc = _read_feature_collection(path)
    records = []
    for idx, feat in enumerate(doc["features"]):
        where = f"{path}: feature {idx}"
        geom = feat.get("geometry") or {}
        if geom.get("type") != "LineString":
            raise IngestError(f"{where}: geometry must be LineString")
        try:
            polyline = tuple(GeoPoint(float(lat), float(lon))
                             for lon, lat in geom["coordinates"])
        except (GeoError, ValueError, TypeError) as e:
            raise IngestError(f"{where}: {e}") from e
        altitudes = _prop(feat, "altitudes", where)
        route_id = str(_prop(feat, "route_id", where))
        try:
            records.append(RouteRecord(route_id, polyline,
                                       tuple(float(a) for a in altitudes)))
        except (IngestError, ValueError, TypeError) as e:
            raise IngestError(f"{where}: {e}") from e
    return records


def load_fire_grid(path) -> FireRiskGrid:
    with open(path) as f:
        doc = json.load(f)
    try:
        min_lon, min_lat, max_lon, max_lat = doc["bbox"]
        cells = tuple(None if c is None else float(c) for c in doc["cells"])
        return FireRiskGrid(BoundingBox(float(min_lat), float(min_lon),
                                        float(max_lat), float(max_lon)),
                            int(doc["n_rows"]), int(doc["n_cols"]), cells)
    except (KeyError, ValueError, TypeError, GeoError) as e:
        raise IngestError(f"{path}: {e}") from e


# writers (synth and round-trip tests share these)

def _point_feature(location: GeoPoint, properties: dict) -> dict:
    return {"type": "Feature",
            "geometry": {"type": "Point",
                         "coordinates": [location.lon, location.lat]},
            "properties": properties}


def write_feature_collection(path, features: list[dict]) -> None:
    doc = {"type": "FeatureCollection", "features": features}
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def save_pois(path, pois: list[PoiRecord]) -> None:
    write_feature_collection(path, [
        _point_feature(p.location, {"poi_id": p.poi_id, "category": p.category})
        for p in pois])


def save_stations(path, stations: list[StationRecord]) -> None:
    write_feature_collection(path, [
        _point_feature(s.location, {"station_id": s.station_id, "kind": s.kind})
        for s in stations])


def save_routes(path, routes: list[RouteRecord]) -> None:
    write_feature_collection(path, [
        {"type": "Feature",
         "geometry": {"type": "LineString",
                      "coordinates": [[v.lon, v.lat] for v in r.polyline]},
         "properties": {"route_id": r.route_id, "altitudes": list(r.altitudes)}}
        for r in routes])


def save_lgas(path, lgas: list[LgaRecord]) -> None:
    features = []
    for lga in lgas:
        coords = [[[[v.lon, v.lat] for v in ring] for ring in poly.rings()]
                  for poly in lga.boundary.polygons]
        features.append({"type": "Feature",
                         "geometry": {"type": "MultiPolygon", "coordinates": coords},
                         "properties": {"lga_name": lga.lga_name}})
    write_feature_collection(path, features)


def save_fire_grid(path, grid: FireRiskGrid) -> None:
    doc = {"bbox": [grid.bbox.min_lon, grid.bbox.min_lat,
                    grid.bbox.max_lon, grid.bbox.max_lat],
           "n_rows": grid.n_rows, "n_cols": grid.n_cols,
           "cells": list(grid.cells)}
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


# ---------------------------------------------------------------------------
# LGA assignment

def assign_lga(points: list[DemandPoint],
               lgas: list[LgaRecord]) -> tuple[dict[str, list[int]], list[int]]:
    """Bucket point ids by the first containing LGA (ascending name).

    Returns (name -> point ids, unassigned ids); together they partition the
    input exactly.
    """
    ordered = sorted(lgas, key=lambda l: l.lga_name)
    boxes = [l.bbox() for l in ordered]
    buckets: dict[str, list[int]] = {l.lga_name: [] for l in ordered}
    unassigned = []
    for dp in points:
        for lga, box in zip(ordered, boxes):
            if box.contains(dp.location) and point_in_polygon(dp.location, lga.boundary):
                buckets[lga.lga_name].append(dp.point_id)
                break
        else:
            unassigned.append(dp.point_id)
    return buckets, unassigned
