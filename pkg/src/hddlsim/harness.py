"""Experiment orchestration: detection + announcement passes, paired
baseline/landmark routing over sampled pairs, the rival detector's cost
model, and CSV/JSON emission."""

from __future__ import annotations

import csv
import json
import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import geometry
from .gpsr import route_gpsr
from .hddl import CacheMap, route_hddl_packet
from .hole_detect import (
    BoundaryLoop,
    DetectionConfig,
    detection_pass,
    initiation_geometry,
    _probe_walk,
)
from .hole_model import CacheEntry, HoleRecord, build_record, announce
from .netgen import Network, carve_hole, generate, largest_component

DEFAULT_NODE_COUNTS = (50, 100, 150, 200, 250, 300)


@dataclass
class ExperimentConfig:
    node_counts: Sequence[int] = DEFAULT_NODE_COUNTS
    networks_per_count: int = 50
    area: Tuple[float, float] = (400.0, 400.0)
    radius: float = 20.0
    delta: float = 2.25
    pairs_per_network: int = 50
    carve: Optional[Tuple[float, float, float]] = None  # (cx, cy, hole_radius)
    seed_base: int = 0
    hagr_angle_threshold: float = 5 * math.pi / 6  # radians
    hagr_diameter_threshold: float = 60.0  # meters
    min_pair_separation_factor: float = 5.0  # in radii
    ttl_factor: int = 4

    def __post_init__(self):
        if self.networks_per_count <= 0 or self.pairs_per_network <= 0:
            raise ValueError("counts must be positive")
        if self.delta <= 1:
            raise ValueError("delta must exceed 1")

    def detection(self) -> DetectionConfig:
        return DetectionConfig(delta=self.delta)


@dataclass
class RouteRow:
    node_count: int
    net_index: int
    seed: int
    protocol: str
    src: int
    dst: int
    delivered: bool
    hops: int
    length_m: float
    is_hole_path: bool
    bfs_hops: Optional[int]


@dataclass
class NetworkRow:
    node_count: int
    net_index: int
    seed: int
    n_nodes: int
    largest_component: int
    n_pairs: int
    holes_found: int
    announce_messages: int
    hddl_ratio_evaluations: int
    hagr_cost: int


@dataclass
class RunMetrics:
    routes: List[RouteRow] = field(default_factory=list)
    networks: List[NetworkRow] = field(default_factory=list)
    holes: List[dict] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)


def network_seed(seed_base: int, node_count: int, index: int) -> int:
    """Stable per-network seed derived from (base, count, index)."""
    ss = np.random.SeedSequence([seed_base, node_count, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def bfs_hops(net: Network, src: int, dst: int) -> Optional[int]:
    """Shortest-path hop count on the unit-disk adjacency, None if
    unreachable."""
    if src == dst:
        return 0
    seen = {src: 0}
    q = deque([src])
    while q:
        u = q.popleft()
        for v in net.adjacency[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                if v == dst:
                    return seen[v]
                q.append(v)
    return None


# ---------------------------------------------------------------------------
# Rival detector cost model (angle + loop-diameter recomputation flood).
# ---------------------------------------------------------------------------


def _loop_diameter(net: Network, node: int, angle_threshold_deg: float) -> float:
    """Diameter a node would compute for its boundary loop: the distance
    between the loop vertices farthest left and right of the gap's bisector
    line.  Zero when the walk fails to close."""
    geom = initiation_geometry(net, node, 0.0)
    if geom is None:
        return 0.0
    budget = 2 * net.n
    msg = _probe_walk(net, node, geom.leftmost, counter_clockwise=True, budget=budget)
    if msg is None:
        return 0.0
    origin = net.pos(node)
    bis = geom.bisector
    best_left = None
    best_right = None
    for vid, pos in msg.visited[1:]:
        rel = pos - origin
        off = float(bis[0] * rel[1] - bis[1] * rel[0])
        if best_left is None or off > best_left[0]:
            best_left = (off, pos)
        if best_right is None or off < best_right[0]:
            best_right = (off, pos)
    if best_left is None or best_right is None:
        return 0.0
    return geometry.dist(best_left[1], best_right[1])


def hagr_detection_cost(
    net: Network, angle_threshold: float, diameter_threshold: float
) -> int:
    """Computation count of the angle+diameter detector.

    Every node whose widest angular gap exceeds the threshold computes its
    (angle, diameter) pair, cost 2.  Each node positive on both thresholds
    advertises to its neighbors, each of which recomputes both values (cost
    2, once per node), propagating while both thresholds keep holding.
    """
    thr_deg = math.degrees(angle_threshold)
    cost = 0
    positive: List[int] = []
    qualifying: Set[int] = set()
    diameters: Dict[int, float] = {}
    for node in range(net.n):
        if net.degree(node) < 2:
            continue
        geom = initiation_geometry(net, node, thr_deg)
        if geom is None:
            continue
        qualifying.add(node)
        cost += 2
        diameters[node] = _loop_diameter(net, node, thr_deg)
        if diameters[node] > diameter_threshold:
            positive.append(node)

    triggered: Set[int] = set()
    frontier = deque(sorted(positive))
    while frontier:
        u = frontier.popleft()
        for v in net.adjacency[u]:
            if v in triggered:
                continue
            triggered.add(v)
            cost += 2
            geom = initiation_geometry(net, v, thr_deg)
            if geom is None:
                continue
            if v not in diameters:
                diameters[v] = _loop_diameter(net, v, thr_deg)
            if diameters[v] > diameter_threshold:
                frontier.append(v)
    return cost


# ---------------------------------------------------------------------------
# Full experiment.
# ---------------------------------------------------------------------------


def build_caches(
    net: Network, cfg: DetectionConfig
) -> Tuple[CacheMap, List[HoleRecord], int, int]:
    """Detection pass, record construction and announcement.

    Returns (cache map, records, announcement messages, ratio evaluations).
    """
    outcome = detection_pass(net, cfg)
    caches: CacheMap = {}
    records: List[HoleRecord] = []
    messages = 0
    evals = outcome.ratio_evaluations
    for loop, ev in outcome.detected:
        try:
            rec = build_record(loop, ev, cfg)
        except ValueError:
            continue  # degenerate boundary, nothing to announce
        evals += rec.ef_ratio_evaluations
        records.append(rec)
        cache_map, msgs = announce(net, rec)
        messages += msgs
        for node, entry in cache_map.items():
            caches.setdefault(node, []).append(entry)
    return caches, records, messages, evals


def sample_pairs(
    net: Network,
    rng: np.random.Generator,
    k: int,
    min_separation: float,
) -> List[Tuple[int, int]]:
    """Up to k distinct (src, dst) pairs from the largest component with
    straight-line separation at least min_separation, drawn without
    replacement."""
    comp = largest_component(net)
    eligible: List[Tuple[int, int]] = []
    pos = net.positions
    for i, u in enumerate(comp):
        for v in comp[i + 1 :]:
            if float(np.hypot(*(pos[u] - pos[v]))) >= min_separation:
                eligible.append((u, v))
    if not eligible:
        return []
    if len(eligible) <= k:
        return eligible
    idx = rng.choice(len(eligible), size=k, replace=False)
    return [eligible[i] for i in sorted(idx.tolist())]


def run_network(
    cfg: ExperimentConfig, node_count: int, index: int, metrics: RunMetrics
) -> None:
    seed = network_seed(cfg.seed_base, node_count, index)
    net = generate(seed, node_count, cfg.area, cfg.radius)
    if cfg.carve is not None:
        cx, cy, r = cfg.carve
        net = carve_hole(net, (cx, cy), r)
    det = cfg.detection()
    caches, records, messages, evals = build_caches(net, det)
    hagr = hagr_detection_cost(
        net, cfg.hagr_angle_threshold, cfg.hagr_diameter_threshold
    )
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([cfg.seed_base, node_count, index, 1]))
    )
    pairs = sample_pairs(
        net, rng, cfg.pairs_per_network, cfg.min_pair_separation_factor * cfg.radius
    )
    ttl = cfg.ttl_factor * net.n
    for src, dst in pairs:
        oracle = bfs_hops(net, src, dst)
        g = route_gpsr(net, src, dst, ttl)
        h, pkt = route_hddl_packet(net, caches, src, dst, ttl)
        metrics.routes.append(
            RouteRow(
                node_count, index, seed, "gpsr", src, dst,
                g.delivered, g.hop_count, g.euclidean_length,
                pkt.consulted, oracle,
            )
        )
        metrics.routes.append(
            RouteRow(
                node_count, index, seed, "hddl", src, dst,
                h.delivered, h.hop_count, h.euclidean_length,
                pkt.consulted, oracle,
            )
        )
    for rec in records:
        doc = rec.to_dict()
        doc.update({"node_count": node_count, "net_index": index, "seed": seed})
        metrics.holes.append(doc)
    metrics.networks.append(
        NetworkRow(
            node_count, index, seed, net.n, len(largest_component(net)),
            len(pairs), len(records), messages, evals, hagr,
        )
    )


def run_experiment(cfg: ExperimentConfig) -> RunMetrics:
    """Generate, detect, announce and route over the whole sweep.

    A failing network is skipped with a note instead of aborting the run.
    """
    metrics = RunMetrics()
    for node_count in cfg.node_counts:
        for index in range(cfg.networks_per_count):
            try:
                run_network(cfg, node_count, index, metrics)
            except ValueError as exc:
                metrics.skipped.append(f"n={node_count} index={index}: {exc}")
    return metrics


# ---------------------------------------------------------------------------
# Aggregation and emission.
# ---------------------------------------------------------------------------


def summarize(metrics: RunMetrics) -> List[dict]:
    """Per (node_count, protocol) means over delivered routes."""
    groups: Dict[Tuple[int, str], List[RouteRow]] = {}
    for row in metrics.routes:
        groups.setdefault((row.node_count, row.protocol), []).append(row)
    nets: Dict[int, List[NetworkRow]] = {}
    for nrow in metrics.networks:
        nets.setdefault(nrow.node_count, []).append(nrow)
    out = []
    for (count, proto) in sorted(groups):
        rows = [r for r in groups[(count, proto)] if r.delivered]
        hole_rows = [r for r in rows if r.is_hole_path]
        nrows = nets.get(count, [])
        out.append(
            {
                "node_count": count,
                "protocol": proto,
                "routes": len(groups[(count, proto)]),
                "delivered": len(rows),
                "mean_length_m": _mean([r.length_m for r in rows]),
                "mean_hops": _mean([r.hops for r in rows]),
                "hole_paths": len(hole_rows),
                "hole_mean_length_m": _mean([r.length_m for r in hole_rows]),
                "hole_mean_hops": _mean([r.hops for r in hole_rows]),
                "holes_found": sum(nr.holes_found for nr in nrows),
                "hddl_ratio_evaluations": sum(
                    nr.hddl_ratio_evaluations for nr in nrows
                ),
                "hagr_cost": sum(nr.hagr_cost for nr in nrows),
            }
        )
    return out


def _mean(xs: Sequence[float]) -> float:
    return float(sum(xs) / len(xs)) if xs else float("nan")


ROUTE_COLUMNS = [
    "node_count", "net_index", "seed", "protocol", "src", "dst",
    "delivered", "hops", "length_m", "is_hole_path", "bfs_hops",
]


def emit(metrics: RunMetrics, out_dir: str) -> Dict[str, str]:
    """Write routes.csv, summary.csv and holes.json under out_dir."""
    if not metrics.routes:
        raise ValueError("nothing to emit: empty route set")
    os.makedirs(out_dir, exist_ok=True)
    routes_path = os.path.join(out_dir, "routes.csv")
    with open(routes_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(ROUTE_COLUMNS)
        for r in metrics.routes:
            w.writerow(
                [
                    r.node_count, r.net_index, r.seed, r.protocol, r.src, r.dst,
                    int(r.delivered), r.hops, f"{r.length_m:.6f}",
                    int(r.is_hole_path), "" if r.bfs_hops is None else r.bfs_hops,
                ]
            )
    summary_path = os.path.join(out_dir, "summary.csv")
    rows = summarize(metrics)
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        cols = list(rows[0].keys())
        w.writerow(cols)
        for row in rows:
            w.writerow(
                [
                    f"{row[c]:.6f}" if isinstance(row[c], float) else row[c]
                    for c in cols
                ]
            )
    holes_path = os.path.join(out_dir, "holes.json")
    with open(holes_path, "w", encoding="utf-8") as fh:
        json.dump(metrics.holes, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return {"routes": routes_path, "summary": summary_path, "holes": holes_path}
