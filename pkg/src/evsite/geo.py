"""WGS84 geometry primitives: distances, containment, spatial index, polyline projection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

EARTH_RADIUS_M = 6371008.8
# great-circle meters per degree of latitude (constant on the sphere)
METERS_PER_DEG = EARTH_RADIUS_M * math.pi / 180.0


class GeoError(ValueError):
    """Raised for invalid geometry inputs."""


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise GeoError(f"non-finite coordinate: ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise GeoError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise GeoError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class Polygon:
    """Exterior ring plus optional holes; rings are closed (first == last)."""

    exterior: tuple[GeoPoint, ...]
    holes: tuple[tuple[GeoPoint, ...], ...] = ()

    def __post_init__(self):
        for ring in (self.exterior, *self.holes):
            if len(ring) < 4:
                raise GeoError(f"ring needs >= 4 vertices, got {len(ring)}")
            if ring[0] != ring[-1]:
                raise GeoError("ring is not closed (first != last)")

    def rings(self):
        yield self.exterior
        yield from self.holes


@dataclass(frozen=True)
class MultiPolygon:
    polygons: tuple[Polygon, ...]

    def __post_init__(self):
        if not self.polygons:
            raise GeoError("MultiPolygon must be non-empty")


@dataclass(frozen=True)
class BoundingBox:
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def __post_init__(self):
        if self.min_lat > self.max_lat or self.min_lon > self.max_lon:
            raise GeoError("inverted bounding box")

    def contains(self, p: GeoPoint) -> bool:
        return (self.min_lat <= p.lat <= self.max_lat
                and self.min_lon <= p.lon <= self.max_lon)


def bbox_of_rings(rings) -> BoundingBox:
    lats = [v.lat for ring in rings for v in ring]
    lons = [v.lon for ring in rings for v in ring]
    return BoundingBox(min(lats), min(lons), max(lats), max(lons))


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters (mean Earth radius)."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    s = (math.sin(dlat / 2.0) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(s)))


def _on_segment(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> bool:
    # collinearity + bbox check in the lon/lat plane
    cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon)
    if cross != 0.0:
        return False
    return (min(a.lon, b.lon) <= p.lon <= max(a.lon, b.lon)
            and min(a.lat, b.lat) <= p.lat <= max(a.lat, b.lat))


def _ring_crossings(p: GeoPoint, ring) -> int:
    """Number of ring edges crossed by the eastward ray from p (even-odd)."""
    n = 0
    for i in range(len(ring) - 1):
        a, b = ring[i], ring[i + 1]
        if (a.lat > p.lat) != (b.lat > p.lat):
            x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat)
            if x > p.lon:
                n += 1
    return n


def point_in_polygon(p: GeoPoint, poly: MultiPolygon) -> bool:
    """Even-odd containment in the lon/lat plane; a point on any edge counts inside."""
    for polygon in poly.polygons:
        for ring in polygon.rings():
            for i in range(len(ring) - 1):
                if _on_segment(p, ring[i], ring[i + 1]):
                    return True
        crossings = sum(_ring_crossings(p, ring) for ring in polygon.rings())
        if crossings % 2 == 1:
            return True
    return False


@dataclass
class SpatialIndex:
    """Uniform lat/lon grid over a fixed point set; exact radius and nearest queries."""

    points: list[GeoPoint]
    cell_size: float
    _cells: dict[tuple[int, int], list[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.cell_size <= 0:
            raise GeoError("cell_size must be > 0")
        for i, p in enumerate(self.points):
            self._cells.setdefault(self._key(p), []).append(i)
        keys = self._cells.keys()
        self._row_range = ((min(k[0] for k in keys), max(k[0] for k in keys))
                           if keys else (0, -1))
        self._col_range = ((min(k[1] for k in keys), max(k[1] for k in keys))
                           if keys else (0, -1))

    def _key(self, p: GeoPoint) -> tuple[int, int]:
        return (math.floor(p.lat / self.cell_size), math.floor(p.lon / self.cell_size))

    def __len__(self) -> int:
        return len(self.points)

    def neighbors_within(self, p: GeoPoint, radius_m: float) -> list[int]:
        """Ids of all indexed points at haversine distance <= radius_m, ascending."""
        if radius_m < 0:
            raise GeoError("radius must be >= 0")
        if not self.points:
            return []
        dlat = radius_m / METERS_PER_DEG
        # widest longitude extent of the query disc within the latitude band
        band = min(89.999, max(abs(p.lat - dlat), abs(p.lat + dlat)))
        cos_band = math.cos(math.radians(band))
        if cos_band < 1e-9:
            dlon = 360.0
        else:
            dlon = dlat / cos_band
        r0 = max(math.floor((p.lat - dlat) / self.cell_size), self._row_range[0])
        r1 = min(math.floor((p.lat + dlat) / self.cell_size), self._row_range[1])
        c0 = max(math.floor((p.lon - dlon) / self.cell_size), self._col_range[0])
        c1 = min(math.floor((p.lon + dlon) / self.cell_size), self._col_range[1])
        out = []
        if (r1 - r0 + 1) * (c1 - c0 + 1) > len(self._cells):
            # scanning occupied cells beats enumerating a huge window
            candidates = (ids for (r, c), ids in self._cells.items()
                          if r0 <= r <= r1 and c0 <= c <= c1)
        else:
            candidates = (self._cells.get((r, c), ())
                          for r in range(r0, r1 + 1) for c in range(c0, c1 + 1))
        for ids in candidates:
            for i in ids:
                if haversine_distance(p, self.points[i]) <= radius_m:
                    out.append(i)
        out.sort()
        return out

    def nearest(self, p: GeoPoint) -> tuple[int, float]:
        """(id, distance) of the closest indexed point; ties broken by smallest id."""
        if not self.points:
            raise GeoError("empty index")
        # expand rings of cells until any candidate is found, then an exact
        # radius query at that distance settles the argmin and tie-break
        key = self._key(p)
        max_ring = max(abs(self._row_range[0] - key[0]), abs(self._row_range[1] - key[0]),
                       abs(self._col_range[0] - key[1]), abs(self._col_range[1] - key[1]))
        best = math.inf
        for ring in range(max_ring + 1):
            if ring and 8 * ring > len(self._cells):
                # sparse index: scanning occupied cells beats walking empty rings
                for ids in self._cells.values():
                    for i in ids:
                        best = min(best, haversine_distance(p, self.points[i]))
                break
            found = False
            for r, c in _ring_cells(key, ring):
                for i in self._cells.get((r, c), ()):
                    found = True
                    d = haversine_distance(p, self.points[i])
                    best = min(best, d)
            if found:
                break
        ids = self.neighbors_within(p, best)
        best_id = min(ids, key=lambda i: (haversine_distance(p, self.points[i]), i))
        return best_id, haversine_distance(p, self.points[best_id])


def _ring_cells(center: tuple[int, int], ring: int):
    r0, c0 = center
    if ring == 0:
        yield (r0, c0)
        return
    for c in range(c0 - ring, c0 + ring + 1):
        yield (r0 - ring, c)
        yield (r0 + ring, c)
    for r in range(r0 - ring + 1, r0 + ring):
        yield (r, c0 - ring)
        yield (r, c0 + ring)


def build_index(points: list[GeoPoint], cell_size: float) -> SpatialIndex:
    return SpatialIndex(list(points), cell_size)


def project_to_polyline(p: GeoPoint, polyline) -> tuple[GeoPoint, float]:
    """Closest point on the polyline and its distance from p.

    Projection runs in a local equirectangular plane centered on p, which is
    accurate at the sub-kilometer snap distances this is used for.
    """
    if len(polyline) < 2:
        raise GeoError("degenerate polyline")
    cos_lat = math.cos(math.radians(p.lat))

    def to_plane(v: GeoPoint) -> tuple[float, float]:
        return ((v.lon - p.lon) * cos_lat * METERS_PER_DEG,
                (v.lat - p.lat) * METERS_PER_DEG)

    best_pt = polyline[0]
    best_d = haversine_distance(p, polyline[0])
    for i in range(len(polyline) - 1):
        a, b = polyline[i], polyline[i + 1]
        ax, ay = to_plane(a)
        bx, by = to_plane(b)
        dx, dy = bx - ax, by - ay
        seg_len2 = dx * dx + dy * dy
        if seg_len2 == 0.0:
            t = 0.0
        else:
            t = max(0.0, min(1.0, -(ax * dx + ay * dy) / seg_len2))
        cand = GeoPoint(a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon))
        d = haversine_distance(p, cand)
        if d < best_d:
            best_d, best_pt = d, cand
    return best_pt, best_d
