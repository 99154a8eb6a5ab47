"""Planar geometry primitives for hole detection and landmark routing.

All functions are pure and operate on 2-vectors (anything ``np.asarray``
accepts).  Angles handed to callers are degrees, to match the protocol's
thresholds; internal trigonometry is radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * math.pi

# Side labels returned by side_of_line / landmark_subregion.
LEFT = "left"
RIGHT = "right"
ON = "on"
A_SIDE = "A_side"
B_SIDE = "B_side"


def as_point(p) -> np.ndarray:
    """Coerce to a finite float 2-vector."""
    q = np.asarray(p, dtype=float)
    if q.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"non-finite point: {q!r}")
    return q


def dist(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return float(math.hypot(p[0] - q[0], p[1] - q[1]))


@dataclass(frozen=True)
class Segment:
    """Directed segment from ``a`` to ``b``; endpoints must differ."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        if np.array_equal(self.a, self.b):
            raise ValueError("degenerate segment: a == b")

    @property
    def length(self) -> float:
        return dist(self.a, self.b)

    @property
    def midpoint(self) -> np.ndarray:
        return (self.a + self.b) / 2.0


def angle_between(prev, apex, next_) -> float:
    """Counter-clockwise angle at ``apex`` from ray apex->prev to ray
    apex->next, in degrees within [0, 360).

    The value is reflex (>180) when the sweep from the first edge to the
    second opens past a straight line, which is how boundary nodes see the
    empty region between their two boundary-adjacent neighbors.
    """
    prev = as_point(prev)
    apex = as_point(apex)
    next_ = as_point(next_)
    u = prev - apex
    v = next_ - apex
    if not u.any() or not v.any():
        raise ValueError("degenerate angle: a ray endpoint coincides with the apex")
    a0 = math.atan2(u[1], u[0])
    a1 = math.atan2(v[1], v[0])
    return math.degrees((a1 - a0) % TWO_PI)


def side_of_line(seg: Segment, p) -> str:
    """Which side of the directed line seg.a->seg.b the point lies on.

    The "on" band is relative: |cross| < 1e-9 * |segment| * |p - a|, so
    orientation does not flicker from floating-point noise near the line.
    """
    p = as_point(p)
    d = seg.b - seg.a
    w = p - seg.a
    cross = d[0] * w[1] - d[1] * w[0]
    tol = 1e-9 * seg.length * float(np.hypot(*w))
    if abs(cross) <= tol:
        return ON
    return LEFT if cross > 0 else RIGHT


def _ccw_offset(base: float, angle: float) -> float:
    return (angle - base) % TWO_PI


def sweep_neighbor_indices(
    apex, bisector_dir, neighbors: Sequence
) -> Tuple[int, int]:
    """Index variant of :func:`sweep_neighbors`.

    leftmost  = first neighbor met by a ray rotating counter-clockwise from
                the bisector direction,
    rightmost = first met rotating clockwise.
    Ties at equal sweep angle go to the nearer neighbor, then the lower index.
    """
    if len(neighbors) == 0:
        raise ValueError("sweep over empty neighbor set")
    apex = as_point(apex)
    b = as_point(bisector_dir)
    if not b.any():
        raise ValueError("zero bisector direction")
    base = math.atan2(b[1], b[0])

    keyed = []
    for idx, nb in enumerate(neighbors):
        nb = as_point(nb)
        rel = nb - apex
        ang = math.atan2(rel[1], rel[0])
        keyed.append((_ccw_offset(base, ang), dist(apex, nb), idx))
    leftmost = min(keyed)[2]
    cw_keyed = [
        (((TWO_PI - off) % TWO_PI) if off != 0.0 else 0.0, d, idx)
        for off, d, idx in keyed
    ]
    rightmost = min(cw_keyed)[2]
    return leftmost, rightmost


def sweep_neighbors(apex, bisector_dir, neighbors: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    """Return (leftmost, rightmost) neighbor points around ``apex``."""
    li, ri = sweep_neighbor_indices(apex, bisector_dir, neighbors)
    return as_point(neighbors[li]), as_point(neighbors[ri])


@dataclass(frozen=True)
class ShadedRegion:
    """Perpendicular half-strip behind segment ab.

    Bounded by the line through ab and the two rays perpendicular to ab at a
    and at b, extending to the side identified by ``far_side_sign`` (+1 for
    the left of a->b, -1 for the right).  Destinations in this strip are
    hidden behind the segment.
    """

    a: np.ndarray
    b: np.ndarray
    far_side_sign: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        if self.far_side_sign not in (+1, -1):
            raise ValueError("far_side_sign must be +1 or -1")
        if np.array_equal(self.a, self.b):
            raise ValueError("degenerate region: a == b")


def shaded_contains(region: ShadedRegion, d) -> bool:
    """True iff ``d`` lies strictly on the far side of line ab and its
    projection onto the line falls within segment ab (inclusive)."""
    d = as_point(d)
    ab = region.b - region.a
    w = d - region.a
    cross = ab[0] * w[1] - ab[1] * w[0]
    if cross * region.far_side_sign <= 0:
        return False
    t = float(np.dot(w, ab)) / float(np.dot(ab, ab))
    return 0.0 <= t <= 1.0


def landmark_subregion(a, b, far_side_sign: int, d) -> str:
    """Which half of the shaded strip ``d`` falls in.

    The strip is split by the perpendicular at the midpoint of ab; the a-side
    half is A_SIDE, the b-side half B_SIDE.  Points exactly on the split line
    go to A_SIDE.
    """
    region = ShadedRegion(a, b, far_side_sign)
    d = as_point(d)
    if not shaded_contains(region, d):
        raise ValueError("point outside the shaded region")
    ab = region.b - region.a
    t = float(np.dot(d - region.a, ab)) / float(np.dot(ab, ab))
    return A_SIDE if t <= 0.5 else B_SIDE


@dataclass(frozen=True)
class AnnouncementTriangle:
    """Announcement area: base ef with apex k on the perpendicular bisector."""

    e: np.ndarray
    f: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "e", as_point(self.e))
        object.__setattr__(self, "f", as_point(self.f))
        object.__setattr__(self, "k", as_point(self.k))

    @property
    def depth(self) -> float:
        return dist(self.k, (self.e + self.f) / 2.0)

    @property
    def area(self) -> float:
        ef = self.f - self.e
        ek = self.k - self.e
        return abs(ef[0] * ek[1] - ef[1] * ek[0]) / 2.0


def triangle_contains(t: AnnouncementTriangle, p) -> bool:
    """Standard point-in-triangle test, boundary inclusive."""
    p = as_point(p)
    verts = (t.e, t.f, t.k)
    scale = max(dist(verts[i], verts[(i + 1) % 3]) for i in range(3))
    tol = 1e-12 * max(scale, 1.0) ** 2
    signs = []
    for i in range(3):
        u = verts[(i + 1) % 3] - verts[i]
        w = p - verts[i]
        signs.append(u[0] * w[1] - u[1] * w[0])
    return all(s >= -tol for s in signs) or all(s <= tol for s in signs)
