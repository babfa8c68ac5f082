"""Run configuration: JSON document with strict key checking and full defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .constraints import ConstraintConfig


class ConfigError(ValueError):
    pass


LAYER_KEYS = ("trips", "stations", "lgas", "pois", "routes", "fire_grid")

DEFAULTS = {
    "cleaning": {"max_speed_mps": 60.0},
    "demand": {"dwell_radius_m": 100.0, "dwell_min_s": 600.0},
    "snap": {"poi_snap_m": 300.0, "route_snap_m": 1000.0},
    "dedup": {"enabled": True, "min_sep_m": 500.0},
    "classify": {"corridor_span_m": 10000.0},
    "evaluate": {"align_m": 1000.0, "coverage_radius_m": 3000.0},
}


@dataclass
class RunConfig:
    layers: dict[str, Path]
    trips_format: str = "csv"
    constraints: ConstraintConfig = field(default_factory=ConstraintConfig)
    max_speed_mps: float = 60.0
    dwell_radius_m: float = 100.0
    dwell_min_s: float = 600.0
    poi_snap_m: float = 300.0
    route_snap_m: float = 1000.0
    dedup_enabled: bool = True
    min_sep_m: float = 500.0
    corridor_span_m: float = 10000.0
    align_m: float = 1000.0
    coverage_radius_m: float = 3000.0
    workers: int = 1
    raw: dict = field(default_factory=dict)


def _section(doc: dict, name: str, allowed: set[str]) -> dict:
    section = doc.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return section


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e

    top_allowed = {"layers", "constraints", "cleaning", "demand", "snap",
                   "dedup", "classify", "evaluate", "workers"}
    unknown = set(doc) - top_allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    layers_doc = _section(doc, "layers", set(LAYER_KEYS) | {"trips_format"})
    missing = [k for k in LAYER_KEYS if k not in layers_doc]
    if missing:
        raise ConfigError(f"config missing layer paths: {missing}")
    base = path.parent
    layers = {k: (base / layers_doc[k] if not Path(layers_doc[k]).is_absolute()
                  else Path(layers_doc[k])) for k in LAYER_KEYS}
    for k, p in layers.items():
        if not p.exists():
            raise ConfigError(f"layer {k!r}: file not found: {p}")

    constraints_doc = _section(doc, "constraints",
                               set(ConstraintConfig.__dataclass_fields__))
    try:
        constraints = ConstraintConfig(**constraints_doc)
    except ValueError as e:
        raise ConfigError(f"invalid constraints: {e}") from e

    sections = {name: {**DEFAULTS[name], **_section(doc, name, set(DEFAULTS[name]))}
                for name in DEFAULTS}
    workers = doc.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers must be a positive integer")

    return RunConfig(
        layers=layers,
        trips_format=str(layers_doc.get("trips_format", "csv")),
        constraints=constraints,
        max_speed_mps=float(sections["cleaning"]["max_speed_mps"]),
        dwell_radius_m=float(sections["demand"]["dwell_radius_m"]),
        dwell_min_s=float(sections["demand"]["dwell_min_s"]),
        poi_snap_m=float(sections["snap"]["poi_snap_m"]),
        route_snap_m=float(sections["snap"]["route_snap_m"]),
        dedup_enabled=bool(sections["dedup"]["enabled"]),
        min_sep_m=float(sections["dedup"]["min_sep_m"]),
        corridor_span_m=float(sections["classify"]["corridor_span_m"]),
        align_m=float(sections["evaluate"]["align_m"]),
        coverage_radius_m=float(sections["evaluate"]["coverage_radius_m"]),
        workers=workers,
        raw=doc,
    )


def default_config_dict(scenario_dir: str = ".") -> dict:
    """A complete config document pointing at a scenario directory's files."""
    d = Path(scenario_dir)
    return {
        "layers": {
            "trips": str(d / "trips.csv"),
            "stations": str(d / "stations.geojson"),
            "lgas": str(d / "lgas.geojson"),
            "pois": str(d / "pois.geojson"),
            "routes": str(d / "routes.geojson"),
            "fire_grid": str(d / "fire_grid.json"),
        },
        "constraints": {},
        **{k: dict(v) for k, v in DEFAULTS.items()},
        "workers": 1,
    }
