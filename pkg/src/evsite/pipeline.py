"""End-to-end orchestration shared by the CLI commands."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import cluster, constraints, evaluate, ingest, recommend
from .config import RunConfig
from .constraints import RouteLocator
from .geo import GeoPoint

KIND_COLORS = {
    "existing_fast": "#00008B",
    "existing_destination": "#ADD8E6",
    "approved": "#008000",
    "recommended_fast": "#FF0000",
    "recommended_destination": "#FFA500",
}


class PipelineError(RuntimeError):
    pass


@dataclass
class Layers:
    trips: list[ingest.TripRecord]
    trip_load_errors: list[str]
    stations: list[ingest.StationRecord]
    lgas: list[ingest.LgaRecord]
    pois: list[ingest.PoiRecord]
    routes: list[ingest.RouteRecord]
    fire_grid: ingest.FireRiskGrid


@dataclass
class PipelineResult:
    layers: Layers
    cleaning: ingest.CleaningSummary
    demand_points: list[ingest.DemandPoint]
    buckets: dict[str, list[ingest.DemandPoint]]
    unassigned: list[int]
    cluster_results: list[cluster.LgaClusterResult]
    recs_pre_dedup: list[recommend.Recommendation]
    recs_final: list[recommend.Recommendation]


def load_layers(cfg: RunConfig) -> Layers:
    trips, errors = ingest.load_trips(cfg.layers["trips"], cfg.trips_format)
    return Layers(
        trips=trips,
        trip_load_errors=errors,
        stations=ingest.load_stations(cfg.layers["stations"]),
        lgas=ingest.load_lgas(cfg.layers["lgas"]),
        pois=ingest.load_pois(cfg.layers["pois"]),
        routes=ingest.load_routes(cfg.layers["routes"]),
        fire_grid=ingest.load_fire_grid(cfg.layers["fire_grid"]),
    )


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    layers = load_layers(cfg)
    c = cfg.constraints
    if not layers.routes and (c.minpts_factor_flood != 1.0):
        raise PipelineError("no altitude source: routes layer is empty but a "
                            "flood (altitude) adjustment is enabled")

    trips, cleaning = ingest.clean_trips(layers.trips, cfg.max_speed_mps)
    demand = ingest.extract_demand_points(trips, cfg.dwell_radius_m, cfg.dwell_min_s)
    bucket_ids, unassigned = ingest.assign_lga(demand, layers.lgas)

    contexts_all = constraints.annotate_context(
        demand, layers.pois, layers.routes, layers.fire_grid)
    by_id = {dp.point_id: i for i, dp in enumerate(demand)}
    buckets = {name: [demand[by_id[i]] for i in ids]
               for name, ids in bucket_ids.items()}
    bucket_ctx = {name: [contexts_all[by_id[i]] for i in ids]
                  for name, ids in bucket_ids.items()}

    results = cluster.cluster_all(buckets, bucket_ctx, c, workers=cfg.workers)
    recs_pre = recommend.propose_all(
        results, buckets, layers.pois, layers.routes, layers.fire_grid, c,
        cfg.poi_snap_m, cfg.route_snap_m, cfg.corridor_span_m)
    if cfg.dedup_enabled:
        recs_final = recommend.dedup(recs_pre, layers.stations, cfg.min_sep_m)
    else:
        recs_final = list(recs_pre)

    return PipelineResult(layers, cleaning, demand, buckets, unassigned,
                          results, recs_pre, recs_final)


def _json_value(v):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return None
    return v


def recommendations_features(recs: list[recommend.Recommendation]) -> list[dict]:
    features = []
    for r in recs:
        kind = f"recommended_{r.charger_kind}"
        features.append({
            "type": "Feature",
            "id": r.rec_id,
            "geometry": {"type": "Point",
                         "coordinates": [r.location.lon, r.location.lat]},
            "properties": {
                "kind": kind,
                "color": KIND_COLORS[kind],
                "altitude_m": _json_value(r.altitude_m),
                "ffdi_delta": r.ffdi_delta,
                "flood_flag": r.flood_flag,
                "fire_flag": r.fire_flag,
                "cluster_size": r.cluster_size,
                "snap_target": r.snap_target,
                "snap_dist_m": _json_value(r.snap_dist_m),
                "lga_name": r.lga_name,
            },
        })
    return features


def station_features(result: PipelineResult, cfg: RunConfig) -> list[dict]:
    locator = RouteLocator(result.layers.routes)
    features = []
    for s in sorted(result.layers.stations, key=lambda s: s.station_id):
        altitude = locator.altitude_at(s.location) if locator else None
        ffdi = constraints.lookup_ffdi(s.location, result.layers.fire_grid)
        c = cfg.constraints
        features.append({
            "type": "Feature",
            "id": s.station_id,
            "geometry": {"type": "Point",
                         "coordinates": [s.location.lon, s.location.lat]},
            "properties": {
                "kind": s.kind,
                "color": KIND_COLORS[s.kind],
                "altitude_m": _json_value(altitude),
                "ffdi_delta": ffdi,
                "flood_flag": (altitude is not None and altitude < c.flood_alt_m),
                "fire_flag": None if ffdi is None else ffdi >= c.ffdi_threshold,
                "cluster_size": None,
                "snap_target": None,
                "lga_name": evaluate.locate_lga(s.location, result.layers.lgas),
            },
        })
    return features


def write_json(path, doc) -> None:
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def write_outputs(result: PipelineResult, cfg: RunConfig, out_dir) -> dict:
    """Write recommendations.geojson, stations.geojson, run_summary.json.

    Outputs are sorted and timing-free, so identical inputs give identical bytes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "recommendations.geojson",
               {"type": "FeatureCollection",
                "features": recommendations_features(result.recs_final)})
    write_json(out / "stations.geojson",
               {"type": "FeatureCollection",
                "features": station_features(result, cfg)})
    summary = {
        "config": cfg.raw,
        "cleaning": result.cleaning.as_dict(),
        "trip_load_errors": len(result.layers.trip_load_errors),
        "demand_points": len(result.demand_points),
        "unassigned_points": len(result.unassigned),
        "per_lga_clusters": {r.lga_name: r.assignment.cluster_count
                             for r in result.cluster_results},
        "recommendations_pre_dedup": len(result.recs_pre_dedup),
        "recommendations": len(result.recs_final),
    }
    write_json(out / "run_summary.json", summary)
    return summary


def write_evaluation(result: PipelineResult, cfg: RunConfig, out_dir) -> evaluate.EvaluationReport:
    report = evaluate.build_report(
        result.demand_points, result.layers.lgas, result.layers.stations,
        result.recs_pre_dedup, result.recs_final,
        cfg.align_m, cfg.coverage_radius_m)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "evaluation.json", report.as_dict())
    (out / "evaluation.txt").write_text(report.as_table())
    return report
