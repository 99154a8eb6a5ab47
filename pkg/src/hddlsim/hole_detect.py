"""Probe-based hole detection.

A node whose neighbors leave an angular gap wider than the threshold sends
two boundary probes, one each way around the gap.  Each relay appends its
location and forwards to the next neighbor of the boundary walk.  When both
probes return, the initiator compares, for every collected vertex, the probe
path against the straight-line distance; a vertex whose ratio exceeds the
threshold witnesses a hole.

The probe-path length of a vertex the initiator can reach directly is its
one-hop distance, so within-range vertices always have ratio 1 and can never
witness: no detour exists between nodes that talk directly.  For vertices
beyond range the longer of the two directional paths is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import geometry
from .netgen import Network

TWO_PI = 2.0 * math.pi

CLOCKWISE = "clockwise"
COUNTER_CLOCKWISE = "counter_clockwise"


@dataclass
class DetectionConfig:
    delta: float = 2.25
    angle_threshold: float = 120.0  # degrees
    probe_hop_budget: Optional[int] = None  # defaults to 2n

    def __post_init__(self):
        if self.delta <= 1:
            raise ValueError("delta must exceed 1")
        if not 0 < self.angle_threshold < 360:
            raise ValueError("angle_threshold must be in (0, 360)")

    def budget(self, net: Network) -> int:
        return self.probe_hop_budget if self.probe_hop_budget else 2 * net.n


@dataclass
class ProbeMessage:
    initiator: int
    direction: str
    visited: List[Tuple[int, np.ndarray]]
    hop_budget: int


@dataclass(frozen=True)
class InitiationGeometry:
    leftmost: int
    rightmost: int
    bisector: np.ndarray  # unit vector into the gap
    gap_deg: float


@dataclass
class BoundaryLoop:
    """Closed boundary collected by the two probes.

    ``vertex_ids`` is the clockwise circulation order starting at the
    initiator; prefix maps hold the cumulative path length from the
    initiator to each vertex's first visit, one per direction.  ``radius``
    is the transmission range of the network the probes ran on (None for
    purely geometric fixtures).
    """

    initiator: int
    vertex_ids: List[int]
    points: Dict[int, np.ndarray]
    cw_prefix: Dict[int, float]
    ccw_prefix: Dict[int, float]
    cw_total: float
    ccw_total: float
    radius: Optional[float] = None

    @property
    def vertices(self) -> List[Tuple[int, np.ndarray]]:
        return [(i, self.points[i]) for i in self.vertex_ids]

    def scan_ids(self) -> List[int]:
        """Clockwise scan order: every vertex after the initiator, first
        occurrences only."""
        seen = {self.initiator}
        order = []
        for v in self.vertex_ids:
            if v not in seen:
                seen.add(v)
                order.append(v)
        # vertices only the reverse walk saw still get investigated
        for v in self.ccw_prefix:
            if v not in seen:
                seen.add(v)
                order.append(v)
        return order

    @classmethod
    def from_polygon(
        cls,
        points: Sequence,
        radius: Optional[float] = None,
        ids: Optional[Sequence[int]] = None,
    ) -> "BoundaryLoop":
        """Build a loop from an explicit closed polygon.

        The vertex sequence is taken as the clockwise circulation starting
        at the initiator (index 0); the reverse circulation runs through the
        closing edge.
        """
        pts = [geometry.as_point(p) for p in points]
        k = len(pts)
        if k < 3:
            raise ValueError("a closed boundary needs at least 3 vertices")
        vid = list(ids) if ids is not None else list(range(k))
        if len(vid) != k:
            raise ValueError("ids must match points")
        edge = [geometry.dist(pts[i], pts[(i + 1) % k]) for i in range(k)]
        total = sum(edge)
        cw: Dict[int, float] = {}
        acc = 0.0
        for i in range(k):
            cw.setdefault(vid[i], acc)
            if i < k - 1:
                acc += edge[i]
        ccw: Dict[int, float] = {vid[0]: 0.0}
        acc = 0.0
        for i in range(k - 1, 0, -1):
            acc += edge[i]
            ccw.setdefault(vid[i], acc)
        return cls(
            initiator=vid[0],
            vertex_ids=list(vid),
            points={vid[i]: pts[i] for i in range(k)},
            cw_prefix=cw,
            ccw_prefix=ccw,
            cw_total=total,
            ccw_total=total,
            radius=radius,
        )


@dataclass(frozen=True)
class HoleEvidence:
    witness: int
    ratio: float


def _angular_gaps(net: Network, node: int) -> List[Tuple[float, float, int, int]]:
    """(gap_deg, start_angle_rad, start_id, end_id) for consecutive
    neighbors in angular order, wrapping around."""
    table = net.angle_order[node]
    gaps = []
    m = len(table)
    for i in range(m):
        a0, v0 = table[i]
        a1, v1 = table[(i + 1) % m]
        span = (a1 - a0) % TWO_PI if m > 1 else TWO_PI
        if m > 1 and i == m - 1:
            span = (a1 + TWO_PI - a0) % TWO_PI or TWO_PI
        gaps.append((math.degrees(span), a0, v0, v1))
    return gaps


def should_initiate(
    net: Network, node: int, suppressed: Set[int], angle_threshold: float = 120.0
) -> Optional[InitiationGeometry]:
    """Initiation gate: an unsuppressed node with an angular gap between
    consecutive neighbors wider than the threshold, returning the gap's
    sweep geometry."""
    if node in suppressed:
        return None
    if net.degree(node) < 2:
        return None
    return initiation_geometry(net, node, angle_threshold)


def initiation_geometry(
    net: Network, node: int, angle_threshold: float
) -> Optional[InitiationGeometry]:
    """Gap test over radio neighbors; probe entry edges over the planar
    subgraph, whose faces the probes traverse."""
    gaps = _angular_gaps(net, node)
    if not gaps:
        return None
    gap_deg, start_angle, _, _ = max(gaps, key=lambda g: (g[0], -g[1]))
    if gap_deg <= angle_threshold:
        return None
    bis_angle = start_angle + math.radians(gap_deg) / 2.0
    bisector = np.array([math.cos(bis_angle), math.sin(bis_angle)])
    walk_neighbors = net.planar_adjacency[node]
    if not walk_neighbors:
        return None
    neighbors = [net.pos(v) for v in walk_neighbors]
    li, ri = geometry.sweep_neighbor_indices(net.pos(node), bisector, neighbors)
    return InitiationGeometry(
        leftmost=walk_neighbors[li],
        rightmost=walk_neighbors[ri],
        bisector=bisector,
        gap_deg=gap_deg,
    )


def _next_boundary_hop(
    net: Network, cur: int, prev: int, counter_clockwise: bool
) -> Optional[int]:
    """Boundary-walk relay rule: first planar neighbor swept from the
    reversed incoming edge, counter-clockwise for one probe and clockwise
    for the other.  Walking the planar subgraph keeps the two directional
    probes on the same face (crossing radio links would split them).  The
    sender is a last resort only: a probe at a degree-1 relay bounces back,
    the double-traversal a face walk owes a bridge edge."""
    rel = net.pos(prev) - net.pos(cur)
    base = math.atan2(rel[1], rel[0])
    best = None
    for ang, v in net.planar_angle_order[cur]:
        if v == prev:
            continue
        off = (ang - base) % TWO_PI
        if not counter_clockwise:
            off = (TWO_PI - off) % TWO_PI
        key = (off, net.dist(cur, v), v)
        if best is None or key < best:
            best = key
    if best is not None:
        return best[2]
    return prev  # planar adjacency is symmetric, the walk can always retreat


def _probe_walk(
    net: Network, initiator: int, first_hop: int, counter_clockwise: bool, budget: int
) -> Optional[ProbeMessage]:
    msg = ProbeMessage(
        initiator=initiator,
        direction=COUNTER_CLOCKWISE if counter_clockwise else CLOCKWISE,
        visited=[(initiator, net.pos(initiator))],
        hop_budget=budget,
    )
    prev, cur = initiator, first_hop
    hops = 1
    while cur != initiator:
        msg.visited.append((cur, net.pos(cur)))
        if hops >= budget:
            return None
        nxt = _next_boundary_hop(net, cur, prev, counter_clockwise)
        if nxt is None:
            return None
        prev, cur = cur, nxt
        hops += 1
    return msg


def _encloses_area(msg: ProbeMessage) -> bool:
    """Shoelace test: a pure out-and-back walk encloses nothing."""
    pts = [p for _, p in msg.visited]
    area = 0.0
    scale = 0.0
    for i in range(len(pts)):
        q = pts[(i + 1) % len(pts)]
        p = pts[i]
        area += p[0] * q[1] - q[0] * p[1]
        scale = max(scale, abs(p[0]) + abs(p[1]))
    return abs(area) / 2.0 > 1e-9 * max(scale, 1.0) ** 2


def _prefix_lengths(msg: ProbeMessage) -> Tuple[Dict[int, float], float]:
    prefix: Dict[int, float] = {}
    acc = 0.0
    last = msg.visited[0][1]
    prefix[msg.visited[0][0]] = 0.0
    for vid, pos in msg.visited[1:]:
        acc += geometry.dist(last, pos)
        prefix.setdefault(vid, acc)
        last = pos
    total = acc + geometry.dist(last, msg.visited[0][1])
    return prefix, total


def circulate(
    net: Network,
    initiator: int,
    cfg: DetectionConfig,
    suppressed: Optional[Set[int]] = None,
    geom: Optional[InitiationGeometry] = None,
) -> Optional[BoundaryLoop]:
    """Send both probes and assemble the closed boundary.

    Returns None when either probe dead-ends or exhausts its budget.  Every
    node visited by either probe is added to ``suppressed`` (it heard a
    probe, so it will not schedule its own), whether or not the loop closed.
    """
    if geom is None:
        geom = initiation_geometry(net, initiator, cfg.angle_threshold)
        if geom is None:
            return None
    budget = cfg.budget(net)
    cw_msg = _probe_walk(net, initiator, geom.leftmost, counter_clockwise=True, budget=budget)
    ccw_msg = _probe_walk(net, initiator, geom.rightmost, counter_clockwise=False, budget=budget)
    if cw_msg is None or ccw_msg is None:
        return None
    if len(cw_msg.visited) < 3 or len(ccw_msg.visited) < 3:
        return None  # the probes met without enclosing area
    if not _encloses_area(cw_msg):
        return None  # degenerate out-and-back walk, e.g. along a bare path
    if suppressed is not None:
        # the polygon is established; everyone on it heard a probe and
        # will not schedule their own
        suppressed.add(initiator)
        suppressed.update(v for v, _ in cw_msg.visited)
        suppressed.update(v for v, _ in ccw_msg.visited)
    cw_prefix, cw_total = _prefix_lengths(cw_msg)
    ccw_prefix, ccw_total = _prefix_lengths(ccw_msg)
    points = {vid: pos for vid, pos in cw_msg.visited}
    points.update({vid: pos for vid, pos in ccw_msg.visited})
    return BoundaryLoop(
        initiator=initiator,
        vertex_ids=[vid for vid, _ in cw_msg.visited],
        points=points,
        cw_prefix=cw_prefix,
        ccw_prefix=ccw_prefix,
        cw_total=cw_total,
        ccw_total=ccw_total,
        radius=net.radius,
    )


def hole_ratio(loop: BoundaryLoop, v: int) -> float:
    """Probe-path length over Euclidean distance, initiator to v.

    Within transmission range the probe path is the direct one-hop link, so
    the ratio is exactly 1; otherwise the longer of the two directional
    probe paths is used.
    """
    if v == loop.initiator:
        raise ValueError("ratio to the initiator itself is undefined")
    if v not in loop.cw_prefix and v not in loop.ccw_prefix:
        raise ValueError(f"vertex {v} is not on the loop")
    euclid = geometry.dist(loop.points[loop.initiator], loop.points[v])
    if euclid == 0.0:
        raise ValueError("coincident vertex positions")
    if loop.radius is not None and euclid <= loop.radius * (1 + 1e-12):
        return 1.0
    lengths = [m[v] for m in (loop.cw_prefix, loop.ccw_prefix) if v in m]
    return max(lengths) / euclid


def detect(loop: BoundaryLoop, cfg: DetectionConfig) -> Optional[HoleEvidence]:
    """Scan the loop clockwise from the initiator; first vertex whose ratio
    exceeds delta witnesses the hole."""
    ev, _ = detect_with_count(loop, cfg)
    return ev


def detect_with_count(
    loop: BoundaryLoop, cfg: DetectionConfig
) -> Tuple[Optional[HoleEvidence], int]:
    count = 0
    for v in loop.scan_ids():
        count += 1
        r = hole_ratio(loop, v)
        if r > cfg.delta:
            return HoleEvidence(witness=v, ratio=r), count
    return None, count


def interior_population(net: Network, loop: BoundaryLoop) -> int:
    """Number of network nodes strictly inside the loop polygon (winding
    number over the clockwise walk; loop vertices excluded)."""
    pts = np.array([loop.points[v] for v in loop.vertex_ids])
    on_loop = set(loop.vertex_ids) | set(loop.ccw_prefix)
    count = 0
    for node in range(net.n):
        if node in on_loop:
            continue
        x, y = net.positions[node]
        winding = 0
        for i in range(len(pts)):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % len(pts)]
            if y0 <= y < y1 or y1 <= y < y0:
                t = (y - y0) / (y1 - y0)
                if x0 + t * (x1 - x0) > x:
                    winding += 1 if y1 > y0 else -1
        if winding != 0:
            count += 1
    return count


@dataclass
class DetectionOutcome:
    loops: List[BoundaryLoop]
    evidence: List[Optional[HoleEvidence]]
    suppressed: Set[int]
    ratio_evaluations: int

    @property
    def detected(self) -> List[Tuple[BoundaryLoop, HoleEvidence]]:
        return [
            (lp, ev) for lp, ev in zip(self.loops, self.evidence) if ev is not None
        ]


def detection_pass(
    net: Network, cfg: DetectionConfig, max_interior: int = 2
) -> DetectionOutcome:
    """Deterministic full-network pass: candidate initiators in ascending id,
    suppression growing as loops close.

    A hole is a region without active nodes, so circulations that enclose a
    populated area (the walk around the deployment's outer boundary does)
    are discarded; ``max_interior`` nodes inside are tolerated for numeric
    slack and stragglers.
    """
    suppressed: Set[int] = set()
    loops: List[BoundaryLoop] = []
    evidence: List[Optional[HoleEvidence]] = []
    evals = 0
    for node in range(net.n):
        if node in suppressed or net.degree(node) < 2:
            continue
        geom = initiation_geometry(net, node, cfg.angle_threshold)
        if geom is None:
            continue
        loop = circulate(net, node, cfg, suppressed=suppressed, geom=geom)
        if loop is None:
            continue
        if interior_population(net, loop) > max_interior:
            continue
        ev, c = detect_with_count(loop, cfg)
        evals += c
        loops.append(loop)
        evidence.append(ev)
    return DetectionOutcome(loops, evidence, suppressed, evals)
