"""Greedy geographic forwarding with perimeter (face) recovery.

Greedy steps use the full unit-disk adjacency; perimeter recovery walks
faces of the Gabriel planarization by the right-hand rule, changing faces
where an edge crosses the line from the perimeter entry point to the
destination, and returns to greedy at the first node strictly closer to the
destination than the entry point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np

from .netgen import Network

GREEDY = "greedy"
PERIMETER = "perimeter"
LANDMARK = "landmark"

TWO_PI = 2.0 * math.pi


@dataclass
class Path:
    """One routed packet's trace.

    ``mode_trace[i]`` is the forwarding mode of the hop from ``hops[i]`` to
    ``hops[i+1]``.
    """

    hops: List[int]
    delivered: bool
    euclidean_length: float
    mode_trace: List[str]

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1


def default_ttl(net: Network) -> int:
    return 4 * net.n


def greedy_step(net: Network, current: int, dest) -> Optional[int]:
    """Neighbor strictly closer to dest than current, or None when stuck.

    Minimum distance wins; exact ties go to the lower node id.
    """
    dest = np.asarray(dest, dtype=float)
    here = float(np.hypot(*(net.pos(current) - dest)))
    best: Optional[Tuple[float, int]] = None
    for v in net.adjacency[current]:
        d = float(np.hypot(*(net.pos(v) - dest)))
        if d < here and (best is None or (d, v) < best):
            best = (d, v)
    return best[1] if best else None


def _segment_crossing(p1, p2, q1, q2) -> Optional[np.ndarray]:
    """Intersection point of segments p1-p2 and q1-q2, or None.

    Endpoint contacts count as crossings; parallel overlaps do not.
    """
    r = p2 - p1
    s = q2 - q1
    denom = r[0] * s[1] - r[1] * s[0]
    if abs(denom) < 1e-15:
        return None
    qp = q1 - p1
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    eps = 1e-12
    if -eps <= t <= 1 + eps and -eps <= u <= 1 + eps:
        return p1 + t * r
    return None


def _first_ccw_planar(
    net: Network, u: int, base_angle: float, last_resort: Optional[int]
) -> Optional[int]:
    """First planar neighbor of u met sweeping counter-clockwise from
    base_angle.  ``last_resort`` (the node we came from) is only chosen when
    no other neighbor exists."""
    best = None
    fallback = None
    for ang, v in net.planar_angle_order[u]:
        if v == last_resort:
            fallback = v
            continue
        off = (ang - base_angle) % TWO_PI
        d = net.dist(u, v)
        key = (off, d, v)
        if best is None or key < best:
            best = key
    if best is not None:
        return best[2]
    return fallback


@dataclass
class PerimeterState:
    """Face-routing state for one perimeter phase."""

    entry_point: np.ndarray
    entry_dist: float
    crossing_dist: float
    face_edges: Set[Tuple[int, int]] = field(default_factory=set)


class GpsrRouter:
    """Stateful greedy/perimeter stepper toward one target node.

    ``step(cur, prev)`` returns (next_hop, mode) or (None, reason) when the
    route fails (no planar neighbors or a face traversal repeated an edge,
    which signals an unreachable target).
    """

    def __init__(self, net: Network, target_id: int, target_pos=None):
        self.net = net
        self.target_id = target_id
        self.target_pos = (
            np.asarray(target_pos, dtype=float)
            if target_pos is not None
            else net.pos(target_id)
        )
        self.mode = GREEDY
        self.perim: Optional[PerimeterState] = None

    def _enter_perimeter(self, cur: int) -> Optional[int]:
        pos = self.net.pos(cur)
        d = float(np.hypot(*(pos - self.target_pos)))
        self.perim = PerimeterState(entry_point=pos.copy(), entry_dist=d, crossing_dist=d)
        rel = self.target_pos - pos
        base = math.atan2(rel[1], rel[0])
        nxt = _first_ccw_planar(self.net, cur, base, last_resort=None)
        if nxt is None:
            return None
        return self._face_change(cur, nxt)

    def _face_change(self, cur: int, candidate: int) -> Optional[int]:
        """Rotate past edges that cross entry->target closer than the best
        crossing so far (the Karp-Kung face switch)."""
        st = self.perim
        assert st is not None
        guard = len(self.net.planar_adjacency[cur]) + 2
        while guard > 0:
            x = _segment_crossing(
                self.net.pos(cur),
                self.net.pos(candidate),
                st.entry_point,
                self.target_pos,
            )
            if x is None:
                break
            dx = float(np.hypot(*(x - self.target_pos)))
            if dx >= st.crossing_dist - 1e-12:
                break
            st.crossing_dist = dx
            st.face_edges.clear()
            rel = self.net.pos(candidate) - self.net.pos(cur)
            base = math.atan2(rel[1], rel[0])
            nxt = _first_ccw_planar(self.net, cur, base, last_resort=candidate)
            if nxt is None or nxt == candidate:
                break
            candidate = nxt
            guard -= 1
        edge = (cur, candidate)
        if edge in st.face_edges:
            return None
        st.face_edges.add(edge)
        return candidate

    def step(self, cur: int, prev: Optional[int]) -> Tuple[Optional[int], str]:
        if self.mode == PERIMETER:
            st = self.perim
            d = float(np.hypot(*(self.net.pos(cur) - self.target_pos)))
            if d < st.entry_dist:
                self.mode = GREEDY
                self.perim = None
        if self.mode == GREEDY:
            nxt = greedy_step(self.net, cur, self.target_pos)
            if nxt is not None:
                return nxt, GREEDY
            self.mode = PERIMETER
            nxt = self._enter_perimeter(cur)
            return nxt, PERIMETER
        # perimeter relay: right-hand rule from the reversed incoming edge
        rel = self.net.pos(prev) - self.net.pos(cur)
        base = math.atan2(rel[1], rel[0])
        nxt = _first_ccw_planar(self.net, cur, base, last_resort=prev)
        if nxt is None:
            return None, PERIMETER
        return self._face_change(cur, nxt), PERIMETER


def route_gpsr(net: Network, src: int, dst: int, ttl: Optional[int] = None) -> Path:
    """Route a packet from src to the node dst; delivered=False on ttl
    exhaustion, a stuck perimeter traversal, or a disconnected target."""
    if src == dst:
        raise ValueError("src and dst must differ")
    if ttl is None:
        ttl = default_ttl(net)
    router = GpsrRouter(net, dst)
    hops = [src]
    modes: List[str] = []
    length = 0.0
    cur, prev = src, None
    while cur != dst and len(modes) < ttl:
        nxt, mode = router.step(cur, prev)
        if nxt is None:
            return Path(hops, False, length, modes)
        hops.append(nxt)
        modes.append(mode)
        length += net.dist(cur, nxt)
        prev, cur = cur, nxt
    return Path(hops, cur == dst, length, modes)
