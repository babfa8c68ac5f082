"""Per-LGA DBSCAN with per-point adjusted radius and density threshold.

Per-point semantics: N(p) = {q : haversine(p, q) <= eps(p)}, p included;
p is core iff |N(p)| >= minpts(p). Expansion is breadth-first over a queue
seeded with N(p) sorted by id, so labels are fully deterministic.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .constraints import AdjustedParams, ConstraintConfig, PointContext, adjust_params
from .geo import METERS_PER_DEG, build_index
from .ingest import DemandPoint

NOISE = -1


class ClusterError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterAssignment:
    labels: tuple[int, ...]  # NOISE or 0..cluster_count-1, parallel to points
    cluster_count: int


@dataclass(frozen=True)
class LgaClusterResult:
    lga_name: str
    assignment: ClusterAssignment
    per_point_params: tuple[AdjustedParams, ...]


def dbscan_lga(points: list[DemandPoint], contexts: list[PointContext],
               cfg: ConstraintConfig, lga_name: str = "") -> LgaClusterResult:
    if len(points) != len(contexts):
        raise ClusterError("points and contexts must be parallel")
    order = sorted(range(len(points)), key=lambda i: points[i].point_id)
    params = [adjust_params(ctx, cfg) for ctx in contexts]
    index = build_index([dp.location for dp in points],
                        max(cfg.base_eps_m, cfg.eps_max_m) / METERS_PER_DEG / 4
                        if points else 1.0)

    def neighborhood(i: int) -> list[int]:
        return index.neighbors_within(points[i].location, params[i].eps_m)

    labels = [NOISE] * len(points)
    visited = [False] * len(points)
    n_clusters = 0
    for i in order:
        if visited[i]:
            continue
        visited[i] = True
        seeds = neighborhood(i)
        if len(seeds) < params[i].minpts:
            continue
        cluster = n_clusters
        n_clusters += 1
        queue = deque(sorted(seeds, key=lambda j: points[j].point_id))
        while queue:
            q = queue.popleft()
            if not visited[q]:
                visited[q] = True
                reach = neighborhood(q)
                if len(reach) >= params[q].minpts:
                    queue.extend(sorted(reach, key=lambda j: points[j].point_id))
            if labels[q] == NOISE:
                labels[q] = cluster
    return LgaClusterResult(lga_name, ClusterAssignment(tuple(labels), n_clusters),
                            tuple(params))


def cluster_all(buckets: dict[str, list[DemandPoint]],
                contexts: dict[str, list[PointContext]],
                cfg: ConstraintConfig, workers: int = 1) -> list[LgaClusterResult]:
    """One independent clustering per LGA, returned sorted by name."""
    names = sorted(buckets)

    def run(name: str) -> LgaClusterResult:
        return dbscan_lga(buckets[name], contexts[name], cfg, lga_name=name)

    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]
    return results
