"""Adaptive forwarding with two landmarks.

Every forwarding node runs the same decision: a packet carrying a tentative
target is pushed toward it (and the target cleared on arrival); otherwise
the node consults its hole cache, and when the destination hides in a cached
hole's shaded strip on the opposite side, the nearer landmark of that hole
is written into the packet as the tentative target.  Everywhere else the
packet takes a plain greedy/perimeter step toward the destination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import geometry
from .geometry import Segment
from .gpsr import GREEDY, LANDMARK, PERIMETER, GpsrRouter, Path, default_ttl
from .hole_model import CacheEntry
from .netgen import Network

CacheMap = Dict[int, List[CacheEntry]]


@dataclass
class Packet:
    src: int
    dst: int
    dst_pos: np.ndarray
    tentative: Optional[Tuple[int, np.ndarray]] = None
    trace: List[int] = field(default_factory=list)
    mode_trace: List[str] = field(default_factory=list)
    consulted: bool = False  # a cache hit wrote a tentative target
    reached_landmarks: frozenset = frozenset()


def hddl_forward(
    net: Network, caches: CacheMap, node: int, pkt: Packet
) -> Optional[Tuple[int, np.ndarray]]:
    """Per-hop decision, cache half only: returns the landmark to write as
    the tentative target, or None for a plain step toward the destination.

    Callers handle the carrying/clearing of an existing target; this is the
    cache consultation performed by a node holding an untargeted packet.
    Landmarks the packet has already visited are never re-targeted, so a
    recovery walk that brushes the announcement area again cannot bounce
    the packet back.
    """
    best = None
    for idx, entry in enumerate(caches.get(node, ())):
        rec = entry.hole
        line = Segment(rec.a[1], rec.b[1])
        s_node = geometry.side_of_line(line, net.pos(node))
        s_dst = geometry.side_of_line(line, pkt.dst_pos)
        if geometry.ON in (s_node, s_dst) or s_node == s_dst:
            continue
        if not geometry.shaded_contains(rec.shaded, pkt.dst_pos):
            continue
        sub = geometry.landmark_subregion(
            rec.a[1], rec.b[1], rec.shaded.far_side_sign, pkt.dst_pos
        )
        landmark = rec.a if sub == geometry.A_SIDE else rec.b
        if landmark[0] in pkt.reached_landmarks or landmark[0] == node:
            continue
        d = float(np.hypot(*(rec.midpoint - net.pos(node))))
        key = (d, idx)
        if best is None or key < best[0]:
            best = (key, landmark)
    return best[1] if best else None


def route_hddl(
    net: Network,
    caches: CacheMap,
    src: int,
    dst: int,
    ttl: Optional[int] = None,
) -> Path:
    """Route with hole-cache consultation at every hop.

    Both the landmark leg and the final leg run full greedy/perimeter
    semantics, so delivery matches the baseline's guarantee.
    """
    path, _ = route_hddl_packet(net, caches, src, dst, ttl)
    return path


def route_hddl_packet(
    net: Network,
    caches: CacheMap,
    src: int,
    dst: int,
    ttl: Optional[int] = None,
) -> Tuple[Path, Packet]:
    """Route and also expose the packet for hole-path bookkeeping."""
    if src == dst:
        raise ValueError("src and dst must differ")
    if ttl is None:
        ttl = default_ttl(net)
    pkt = Packet(src=src, dst=dst, dst_pos=net.pos(dst).copy(), trace=[src])
    path = _drive(net, caches, pkt, ttl)
    return path, pkt


def _drive(net: Network, caches: CacheMap, pkt: Packet, ttl: int) -> Path:
    router = GpsrRouter(net, pkt.dst)
    cur, prev = pkt.src, None
    length = 0.0
    while cur != pkt.dst and len(pkt.mode_trace) < ttl:
        skip_consult = False
        if pkt.tentative is not None and cur == pkt.tentative[0]:
            pkt.reached_landmarks = pkt.reached_landmarks | {cur}
            pkt.tentative = None
            router = GpsrRouter(net, pkt.dst)
            prev = None
            skip_consult = True
        if pkt.tentative is None and not skip_consult:
            landmark = hddl_forward(net, caches, cur, pkt)
            if landmark is not None:
                pkt.tentative = landmark
                pkt.consulted = True
                router = GpsrRouter(net, landmark[0], landmark[1])
                prev = None
        nxt, mode = router.step(cur, prev)
        if nxt is None:
            return Path(pkt.trace, False, length, pkt.mode_trace)
        if pkt.tentative is not None and mode == GREEDY:
            mode = LANDMARK
        pkt.trace.append(nxt)
        pkt.mode_trace.append(mode)
        length += net.dist(cur, nxt)
        prev, cur = cur, nxt
    return Path(pkt.trace, cur == pkt.dst, length, pkt.mode_trace)
