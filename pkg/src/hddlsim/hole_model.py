"""Shape-free hole records and constrained-flood announcement.

A detected boundary is summarized by its two most-distant vertices; the
segment between them is the board that blocks greedy forwarding.  The
perpendicular half-strip behind the segment holds the hidden destinations,
and the triangle raised over the widest qualifying same-side pair, with
depth 0.87 of the segment length, is flooded with the record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import geometry
from .geometry import AnnouncementTriangle, Segment, ShadedRegion
from .hole_detect import BoundaryLoop, DetectionConfig, HoleEvidence, hole_ratio
from .netgen import Network

DEPTH_FACTOR = 0.87


@dataclass
class HoleRecord:
    """Cached hole summary: landmark pair, shaded strip, announcement area."""

    a: Tuple[int, np.ndarray]
    b: Tuple[int, np.ndarray]
    e: Tuple[int, np.ndarray]
    f: Tuple[int, np.ndarray]
    boundary: BoundaryLoop
    shaded: ShadedRegion
    triangle: AnnouncementTriangle
    L: float
    depth: float
    ef_ratio_evaluations: int = 0

    @property
    def midpoint(self) -> np.ndarray:
        return (self.a[1] + self.b[1]) / 2.0

    def to_dict(self) -> dict:
        return {
            "a": [self.a[0], float(self.a[1][0]), float(self.a[1][1])],
            "b": [self.b[0], float(self.b[1][0]), float(self.b[1][1])],
            "e": [self.e[0], float(self.e[1][0]), float(self.e[1][1])],
            "f": [self.f[0], float(self.f[1][0]), float(self.f[1][1])],
            "k": [float(self.triangle.k[0]), float(self.triangle.k[1])],
            "L": self.L,
            "depth": self.depth,
            "boundary": [
                [vid, float(p[0]), float(p[1])] for vid, p in self.boundary.vertices
            ],
        }


@dataclass(frozen=True)
class CacheEntry:
    hole: HoleRecord


def representative_segment(
    loop: BoundaryLoop,
) -> Tuple[Tuple[int, np.ndarray], Tuple[int, np.ndarray]]:
    """The vertex pair of maximum Euclidean separation.

    Ties resolve to the lexicographically smallest (min id, max id) pair;
    the lower id becomes ``a``.
    """
    items = sorted(loop.points.items())
    if len(items) < 2:
        raise ValueError("loop has fewer than 2 vertices")
    best = None
    for (i, p), (j, q) in combinations(items, 2):
        d = geometry.dist(p, q)
        key = (-d, min(i, j), max(i, j))
        if best is None or key < best[0]:
            best = (key, (i, j))
    i, j = best[1]
    return (i, loop.points[i]), (j, loop.points[j])


def _near_side_sign(loop: BoundaryLoop, a: np.ndarray, b: np.ndarray) -> int:
    """Orientation of the initiator relative to line ab (+1 left, -1 right)."""
    side = geometry.side_of_line(Segment(a, b), loop.points[loop.initiator])
    if side == geometry.ON:
        raise ValueError("degenerate boundary: initiator collinear with the segment")
    return +1 if side == geometry.LEFT else -1


def select_ef(
    loop: BoundaryLoop,
    seg: Tuple[Tuple[int, np.ndarray], Tuple[int, np.ndarray]],
    delta: float = 2.25,
) -> Tuple[Tuple[int, np.ndarray], Tuple[int, np.ndarray]]:
    """Widest vertex pair on the initiator's side of the segment line where
    at least one member passes the detection ratio test.

    Falls back to the widest same-side pair outright when no member of any
    pair qualifies: the hole was already detected, so the announcement must
    still happen.  Returns (e, f) with e the lower id.
    """
    pair, _ = _select_ef_counted(loop, seg, delta)
    return pair


def _select_ef_counted(
    loop: BoundaryLoop,
    seg: Tuple[Tuple[int, np.ndarray], Tuple[int, np.ndarray]],
    delta: float,
):
    (ai, ap), (bi, bp) = seg
    near = _near_side_sign(loop, ap, bp)
    line = Segment(ap, bp)
    side_ids = [
        vid
        for vid in sorted(loop.points)
        if geometry.side_of_line(line, loop.points[vid])
        == (geometry.LEFT if near > 0 else geometry.RIGHT)
    ]
    if len(side_ids) < 2:
        raise ValueError("no vertex pair on the initiator's side of the segment")

    qualifies = {
        vid: (vid != loop.initiator and hole_ratio(loop, vid) > delta)
        for vid in side_ids
    }
    evaluations = sum(1 for vid in side_ids if vid != loop.initiator)

    def widest(pairs):
        best = None
        for i, j in pairs:
            d = geometry.dist(loop.points[i], loop.points[j])
            key = (-d, min(i, j), max(i, j))
            if best is None or key < best[0]:
                best = (key, (i, j))
        return best[1] if best else None

    pick = widest(
        (i, j)
        for i, j in combinations(side_ids, 2)
        if qualifies[i] or qualifies[j]
    )
    if pick is None:
        pick = widest(combinations(side_ids, 2))
    i, j = sorted(pick)
    return ((i, loop.points[i]), (j, loop.points[j])), evaluations


def announcement_depth(L: float) -> float:
    """Depth of the announcement triangle for a hole of extent L."""
    if L <= 0:
        raise ValueError("L must be positive")
    return DEPTH_FACTOR * L


# ---------------------------------------------------------------------------
# Announcement-depth trade-off study.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaObjective:
    """Overhead-vs-path-length scalarization for the announcement triangle.

    l is the half-breadth of the announcement base, h the distance from the
    source to the base midpoint, alpha the base angle; the objective is the
    triangle area times the squared source-to-base path length:
    g(a) = l^2 h^2 tan a + l^4 tan^3 a - 2 h l^3 tan^2 a
         + l^4 tan a / cos^2 a + 2 h l^3 tan a / cos a - 2 l^4 tan^2 a / cos a
    """

    l: float
    h: float

    def g(self, alpha: float) -> float:
        t = math.tan(alpha)
        c = math.cos(alpha)
        l, h = self.l, self.h
        return (
            l * l * h * h * t
            + l**4 * t**3
            - 2 * h * l**3 * t * t
            + l**4 * t / (c * c)
            + 2 * h * l**3 * t / c
            - 2 * l**4 * t * t / c
        )


@dataclass
class AlphaStudy:
    per_h: Dict[float, float]  # h multiple -> argmin alpha (radians)
    mean_alpha: float
    stationary_points: Dict[float, List[float]]  # h multiple -> roots of g'

    @property
    def has_stationary_point(self) -> bool:
        return any(self.stationary_points.values())


def scan_stationary_points(
    h_multiple: float, grid: float = 1e-4, l: float = 1.0
) -> List[float]:
    """Sign changes of the numerical derivative of g over (0, pi/2)."""
    obj = AlphaObjective(l=l, h=h_multiple * l)
    lo, hi = grid, math.pi / 2 - grid
    alphas = np.arange(lo, hi, grid)
    vals = np.array([obj.g(a) for a in alphas])
    dv = np.diff(vals)
    roots = []
    for i in range(len(dv) - 1):
        if dv[i] == 0.0 or (dv[i] < 0) != (dv[i + 1] < 0):
            roots.append(float(alphas[i + 1]))
    return roots


def optimize_alpha(
    h_multiples: Sequence[float] = (2.0, 2.5, 3.0, 3.5, 4.0),
    grid: float = 1e-4,
    l: float = 1.0,
) -> AlphaStudy:
    """Grid search plus local refinement of g over alpha in (0, pi/2), per
    h, with a stationarity scan of the numerical derivative."""
    if grid > 1e-4:
        raise ValueError("grid resolution must be <= 1e-4 rad")
    per_h: Dict[float, float] = {}
    stationary: Dict[float, List[float]] = {}
    for hm in h_multiples:
        if hm <= 1:
            raise ValueError("h must exceed l")
        obj = AlphaObjective(l=l, h=hm * l)
        lo, hi = grid, math.pi / 2 - grid
        alphas = np.arange(lo, hi, grid)
        vals = np.array([obj.g(a) for a in alphas])
        i = int(np.argmin(vals))
        # golden-section refinement inside the bracketing grid cells
        a_lo = alphas[max(i - 1, 0)]
        a_hi = alphas[min(i + 1, len(alphas) - 1)]
        per_h[hm] = _golden_min(obj.g, a_lo, a_hi)
        stationary[hm] = scan_stationary_points(hm, grid=grid, l=l)
    mean = sum(per_h.values()) / len(per_h)
    return AlphaStudy(per_h=per_h, mean_alpha=mean, stationary_points=stationary)


def _golden_min(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fn(c), fn(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


# ---------------------------------------------------------------------------
# Record construction and announcement.
# ---------------------------------------------------------------------------


def build_record(
    loop: BoundaryLoop,
    evidence: HoleEvidence,
    cfg: Optional[DetectionConfig] = None,
) -> HoleRecord:
    """Compose the full hole record from a detected boundary."""
    delta = cfg.delta if cfg else 2.25
    seg = representative_segment(loop)
    (ai, ap), (bi, bp) = seg
    near = _near_side_sign(loop, ap, bp)
    shaded = ShadedRegion(a=ap, b=bp, far_side_sign=-near)
    ((ei, ep), (fi, fp)), ef_evals = _select_ef_counted(loop, seg, delta)
    L = geometry.dist(ap, bp)
    depth = announcement_depth(L)
    c = (ep + fp) / 2.0
    ef = fp - ep
    n1 = np.array([-ef[1], ef[0]]) / float(np.hypot(*ef))
    # apex goes to the initiator's side of the ab line
    ab = bp - ap
    n_ab = np.array([-ab[1], ab[0]]) * near
    if float(np.dot(n1, n_ab)) < 0:
        n1 = -n1
    k = c + depth * n1
    triangle = AnnouncementTriangle(e=ep, f=fp, k=k)
    return HoleRecord(
        a=(ai, ap),
        b=(bi, bp),
        e=(ei, ep),
        f=(fi, fp),
        boundary=loop,
        shaded=shaded,
        triangle=triangle,
        L=L,
        depth=depth,
        ef_ratio_evaluations=ef_evals,
    )


def _near_arc(loop: BoundaryLoop, rec: HoleRecord) -> List[int]:
    """Boundary vertices from e to f along the initiator-side arc,
    endpoints inclusive."""
    order = loop.vertex_ids
    try:
        i_e = order.index(rec.e[0])
        i_f = order.index(rec.f[0])
    except ValueError:
        # a fixture vertex only the reverse probe saw; fall back to endpoints
        return sorted({rec.e[0], rec.f[0]})
    if i_e == i_f:
        return [order[i_e]]
    lo, hi = min(i_e, i_f), max(i_e, i_f)
    arc1 = order[lo : hi + 1]
    arc2 = order[hi:] + order[: lo + 1]
    line = Segment(rec.a[1], rec.b[1])
    near_side = geometry.LEFT if rec.shaded.far_side_sign < 0 else geometry.RIGHT

    def near_count(arc):
        return sum(
            1
            for vid in arc[1:-1]
            if geometry.side_of_line(line, loop.points[vid]) == near_side
        )

    k1, k2 = near_count(arc1), near_count(arc2)
    if (k1, -len(arc1)) >= (k2, -len(arc2)):
        return list(arc1)
    return list(arc2)


def announce(
    net: Network, rec: HoleRecord
) -> Tuple[Dict[int, CacheEntry], int]:
    """Constrained flood of the hole record.

    Seeded by the boundary vertices on the near-side arc between e and f;
    every node inside the announcement triangle that receives the record
    caches it and forwards once to all neighbors; everyone else discards.
    Returns the cache map and the number of point-to-point transmissions.
    """
    seeds = [v for v in _near_arc(loop=rec.boundary, rec=rec) if v < net.n]
    caches: Dict[int, CacheEntry] = {}
    forwarded: Set[int] = set()
    frontier: List[int] = []
    for s in sorted(set(seeds)):
        caches[s] = CacheEntry(hole=rec)
        frontier.append(s)
    messages = 0
    while frontier:
        nxt: List[int] = []
        for u in sorted(frontier):
            if u in forwarded:
                continue
            forwarded.add(u)
            messages += len(net.adjacency[u])
            for v in net.adjacency[u]:
                if v in caches:
                    continue  # duplicate, discarded
                if geometry.triangle_contains(rec.triangle, net.pos(v)):
                    caches[v] = CacheEntry(hole=rec)
                    nxt.append(v)
        frontier = nxt
    return caches, messages
