"""Evaluation of recommendations against an existing station plan."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geo import GeoPoint, haversine_distance, point_in_polygon
from .ingest import DemandPoint, LgaRecord, StationRecord
from .recommend import Recommendation

UNASSIGNED_LGA = "(unassigned)"

_COUNT_KEYS = ("existing_fast", "existing_destination", "approved",
               "recommended_fast", "recommended_destination")


class EvaluateError(ValueError):
    pass


@dataclass
class EvaluationReport:
    per_lga_counts: dict[str, dict[str, int]]
    alignment_rate: float
    alignment_rec_count: int
    new_area_count: int
    coverage_before: float
    coverage_after: float
    nearest_existing_distance_stats: dict[str, float | None]

    def as_dict(self) -> dict:
        return {
            "per_lga_counts": {name: dict(row)
                               for name, row in sorted(self.per_lga_counts.items())},
            "alignment_rate": self.alignment_rate,
            "alignment_rec_count": self.alignment_rec_count,
            "new_area_count": self.new_area_count,
            "coverage_before": self.coverage_before,
            "coverage_after": self.coverage_after,
            "nearest_existing_distance_stats": dict(self.nearest_existing_distance_stats),
        }

    def as_table(self) -> str:
        """Plain-text table mirroring the JSON content."""
        header = ["lga"] + list(_COUNT_KEYS)
        rows = [header]
        for name in sorted(self.per_lga_counts):
            row = self.per_lga_counts[name]
            rows.append([name] + [str(row[k]) for k in _COUNT_KEYS])
        totals = ["TOTAL"] + [
            str(sum(r[k] for r in self.per_lga_counts.values())) for k in _COUNT_KEYS]
        rows.append(totals)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
                 for r in rows]
        lines.append("")
        lines.append(f"alignment_rate: {self.alignment_rate} "
                     f"(over {self.alignment_rec_count} recommendations)")
        lines.append(f"new_area_count: {self.new_area_count}")
        lines.append(f"coverage_before: {self.coverage_before}")
        lines.append(f"coverage_after: {self.coverage_after}")
        s = self.nearest_existing_distance_stats
        lines.append("nearest_existing_distance_m: "
                     f"min={s['min']} median={s['median']} "
                     f"mean={s['mean']} max={s['max']}")
        return "\n".join(lines) + "\n"


def alignment_rate(recs: list[Recommendation], stations: list[StationRecord],
                   align_m: float) -> tuple[float, int]:
    """(fraction of recs within align_m of any station, rec count).

    Meant to run on pre-dedup recommendations; an empty rec list reports 0.0
    with count 0.
    """
    if align_m <= 0:
        raise EvaluateError("align_m must be > 0")
    if not recs:
        return 0.0, 0
    aligned = sum(
        1 for r in recs
        if any(haversine_distance(r.location, s.location) <= align_m for s in stations))
    return aligned / len(recs), len(recs)


def coverage(points: list[DemandPoint], sites: list[GeoPoint],
             radius_m: float) -> float:
    """Fraction of demand points within radius_m of any site."""
    if radius_m <= 0:
        raise EvaluateError("radius_m must be > 0")
    if not points:
        raise EvaluateError("no demand points")
    if not sites:
        return 0.0
    covered = sum(
        1 for dp in points
        if any(haversine_distance(dp.location, s) <= radius_m for s in sites))
    return covered / len(points)


def locate_lga(p: GeoPoint, lgas: list[LgaRecord]) -> str:
    for lga in sorted(lgas, key=lambda l: l.lga_name):
        if lga.bbox().contains(p) and point_in_polygon(p, lga.boundary):
            return lga.lga_name
    return UNASSIGNED_LGA


def build_report(demand_points: list[DemandPoint], lgas: list[LgaRecord],
                 stations: list[StationRecord],
                 recs_pre_dedup: list[Recommendation],
                 recs_final: list[Recommendation],
                 align_m: float, coverage_radius_m: float) -> EvaluationReport:
    counts: dict[str, dict[str, int]] = {
        lga.lga_name: {k: 0 for k in _COUNT_KEYS} for lga in lgas}

    def row(name: str) -> dict[str, int]:
        return counts.setdefault(name, {k: 0 for k in _COUNT_KEYS})

    for s in stations:
        row(locate_lga(s.location, lgas))[s.kind] += 1
    for r in recs_final:
        row(r.lga_name if r.lga_name in counts else locate_lga(r.location, lgas))[
            f"recommended_{r.charger_kind}"] += 1

    rate, n_recs = alignment_rate(recs_pre_dedup, stations, align_m)
    new_area = sum(
        1 for r in recs_final
        if all(haversine_distance(r.location, s.location) > align_m for s in stations))

    station_sites = [s.location for s in stations]
    cov_before = coverage(demand_points, station_sites, coverage_radius_m)
    cov_after = coverage(demand_points,
                         station_sites + [r.location for r in recs_final],
                         coverage_radius_m)

    dists = sorted(
        min((haversine_distance(r.location, s.location) for s in stations),
            default=math.inf)
        for r in recs_final)
    if dists and stations:
        n = len(dists)
        median = (dists[n // 2] if n % 2 == 1
                  else (dists[n // 2 - 1] + dists[n // 2]) / 2)
        stats = {"min": dists[0], "median": median,
                 "mean": sum(dists) / n, "max": dists[-1]}
    else:
        stats = {"min": None, "median": None, "mean": None, "max": None}

    return EvaluationReport(
        per_lga_counts=counts, alignment_rate=rate, alignment_rec_count=n_recs,
        new_area_count=new_area, coverage_before=cov_before,
        coverage_after=cov_after, nearest_existing_distance_stats=stats)
