"""Seeded unit-disk network generation, Gabriel planarization, hole carving.

Reproducibility: positions are drawn from numpy's PCG64 generator seeded
through ``SeedSequence(seed).spawn()``, one child stream per purpose
("positions" is stream 0; callers that need per-network pair sampling use
stream 1).  The same seed and parameters always give a bit-identical network.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class Network:
    """Immutable node-position set with unit-disk and Gabriel adjacency.

    ``adjacency[u]`` lists all v with dist(u, v) <= radius, sorted;
    ``planar_adjacency`` is the Gabriel subgraph used for perimeter routing.
    ``angle_order[u]`` holds (angle, neighbor) pairs sorted by the angle of
    v as seen from u, precomputed for angular sweeps and boundary walks.
    """

    positions: np.ndarray
    radius: float
    area: Tuple[float, float]
    adjacency: Tuple[Tuple[int, ...], ...]
    planar_adjacency: Tuple[Tuple[int, ...], ...]
    angle_order: Tuple[Tuple[Tuple[float, int], ...], ...] = field(repr=False)
    planar_angle_order: Tuple[Tuple[Tuple[float, int], ...], ...] = field(repr=False)
    id_map: Optional[Dict[int, int]] = None

    @property
    def n(self) -> int:
        return len(self.positions)

    def pos(self, u: int) -> np.ndarray:
        return self.positions[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def dist(self, u: int, v: int) -> float:
        return float(np.hypot(*(self.positions[u] - self.positions[v])))


def _pairwise_adjacency(positions: np.ndarray, radius: float) -> List[List[int]]:
    n = len(positions)
    adj: List[List[int]] = [[] for _ in range(n)]
    if n < 2:
        return adj
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    r2 = radius * radius
    iu, ju = np.where(np.triu(d2 <= r2, k=1))
    for u, v in zip(iu.tolist(), ju.tolist()):
        adj[u].append(v)
        adj[v].append(u)
    return [sorted(neis) for neis in adj]


def gabriel_planarize(
    positions: np.ndarray, adjacency: Sequence[Sequence[int]]
) -> List[List[int]]:
    """Keep edge (u, v) iff no third node lies strictly inside the disk
    whose diameter is uv.  Subgraph of the input adjacency, symmetric."""
    n = len(positions)
    planar: List[List[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in adjacency[u]:
            if v <= u:
                continue
            mid = (positions[u] + positions[v]) / 2.0
            r2 = float(np.dot(positions[u] - mid, positions[u] - mid))
            d2 = np.einsum("ij,ij->i", positions - mid, positions - mid)
            d2[u] = np.inf
            d2[v] = np.inf
            if not np.any(d2 < r2 * (1.0 - 1e-12)):
                planar[u].append(v)
                planar[v].append(u)
    return [sorted(neis) for neis in planar]


def _angle_tables(
    positions: np.ndarray, adjacency: Sequence[Sequence[int]]
) -> Tuple[Tuple[Tuple[float, int], ...], ...]:
    tables = []
    for u, neis in enumerate(adjacency):
        entries = []
        for v in neis:
            rel = positions[v] - positions[u]
            entries.append((math.atan2(rel[1], rel[0]), v))
        entries.sort()
        tables.append(tuple(entries))
    return tuple(tables)


def make_network(
    positions: np.ndarray,
    radius: float,
    area: Tuple[float, float],
    id_map: Optional[Dict[int, int]] = None,
) -> Network:
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise ValueError("positions must be an (n, 2) array")
    if len(positions) < 2:
        raise ValueError("a network needs at least 2 nodes")
    adjacency = _pairwise_adjacency(positions, radius)
    planar = gabriel_planarize(positions, adjacency)
    return Network(
        positions=positions,
        radius=float(radius),
        area=(float(area[0]), float(area[1])),
        adjacency=tuple(tuple(a) for a in adjacency),
        planar_adjacency=tuple(tuple(a) for a in planar),
        angle_order=_angle_tables(positions, adjacency),
        planar_angle_order=_angle_tables(positions, planar),
        id_map=id_map,
    )


def generate(seed: int, n: int, area: Tuple[float, float], radius: float) -> Network:
    """n i.i.d. uniform points over the area from a deterministic PRNG."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if radius <= 0:
        raise ValueError("radius must be positive")
    streams = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.Generator(np.random.PCG64(streams[0]))
    positions = rng.random((n, 2)) * np.asarray(area, dtype=float)
    return make_network(positions, radius, area)


def pair_stream(seed: int) -> np.random.Generator:
    """The sibling PRNG stream reserved for source/destination sampling."""
    streams = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(streams[1]))


def carve_hole(net: Network, center, hole_radius: float) -> Network:
    """Remove every node strictly within hole_radius of center and rebuild.

    Node ids are re-densified; the old->new mapping is recorded on the
    returned network's ``id_map``.
    """
    if hole_radius < 0:
        raise ValueError("hole_radius must be >= 0")
    center = np.asarray(center, dtype=float)
    d = np.hypot(*(net.positions - center).T)
    keep = np.where(d >= hole_radius)[0]
    if len(keep) < 2:
        raise ValueError("carving would leave fewer than 2 nodes")
    id_map = {int(old): new for new, old in enumerate(keep.tolist())}
    return make_network(net.positions[keep], net.radius, net.area, id_map=id_map)


def components(adjacency: Sequence[Sequence[int]]) -> List[List[int]]:
    """Connected components (sorted node lists, largest first)."""
    n = len(adjacency)
    seen = [False] * n
    comps: List[List[int]] = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def largest_component(net: Network) -> List[int]:
    return components(net.adjacency)[0]


# ---------------------------------------------------------------------------
# Scenario files: JSON documents that fully describe one network.
# ---------------------------------------------------------------------------


@dataclass
class Scenario:
    """One network description.

    An explicit ``nodes`` list (id, x, y) overrides seeded generation, which
    is how hand-built counterexample layouts are encoded exactly.  Carve
    directives apply after generation.
    """

    seed: int = 0
    n: int = 2
    area_width: float = 400.0
    area_height: float = 400.0
    radius: float = 20.0
    nodes: Optional[List[Tuple[int, float, float]]] = None
    carve: List[Tuple[float, float, float]] = field(default_factory=list)

    def build(self) -> Network:
        if self.nodes is not None:
            ids = [int(i) for i, _, _ in self.nodes]
            if sorted(ids) != list(range(len(ids))):
                raise ValueError("explicit node ids must be dense 0..n-1")
            positions = np.zeros((len(ids), 2))
            for i, x, y in self.nodes:
                positions[int(i)] = (float(x), float(y))
            net = make_network(
                positions, self.radius, (self.area_width, self.area_height)
            )
        else:
            net = generate(
                self.seed, self.n, (self.area_width, self.area_height), self.radius
            )
        for cx, cy, r in self.carve:
            net = carve_hole(net, (cx, cy), r)
        return net


def dump_scenario(sc: Scenario, path) -> None:
    doc = {
        "seed": sc.seed,
        "n": sc.n,
        "area_width": sc.area_width,
        "area_height": sc.area_height,
        "radius": sc.radius,
    }
    if sc.nodes is not None:
        doc["nodes"] = [[int(i), float(x), float(y)] for i, x, y in sc.nodes]
    if sc.carve:
        doc["carve"] = [
            {"cx": cx, "cy": cy, "hole_radius": r} for cx, cy, r in sc.carve
        ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    nodes = None
    if "nodes" in doc:
        nodes = [(int(i), float(x), float(y)) for i, x, y in doc["nodes"]]
    carve = [
        (float(c["cx"]), float(c["cy"]), float(c["hole_radius"]))
        for c in doc.get("carve", [])
    ]
    return Scenario(
        seed=int(doc.get("seed", 0)),
        n=int(doc.get("n", len(nodes) if nodes else 2)),
        area_width=float(doc.get("area_width", 400.0)),
        area_height=float(doc.get("area_height", 400.0)),
        radius=float(doc.get("radius", 20.0)),
        nodes=nodes,
        carve=carve,
    )


def scenario_from_network(net: Network, seed: int = 0) -> Scenario:
    """Snapshot a built network as an explicit-node scenario."""
    return Scenario(
        seed=seed,
        n=net.n,
        area_width=net.area[0],
        area_height=net.area[1],
        radius=net.radius,
        nodes=[(i, float(x), float(y)) for i, (x, y) in enumerate(net.positions)],
    )
