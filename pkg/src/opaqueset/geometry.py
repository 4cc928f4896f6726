"""Planar primitives: points, segments, convex polygons and their projections.

Angles follow the counterclockwise convention; projecting onto direction
``theta`` means taking the inner product with ``u(theta) = (cos theta, sin theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12

# Caps the size of (n_points x n_theta) projection blocks.
_BLOCK_ELEMENTS = 2_000_000


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValidationError(f"interval with lo > hi: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


def unit(theta):
    """Unit vector(s) ``(cos theta, sin theta)``; shape ``(..., 2)``."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _as_point(p) -> Point2:
    try:
        x, y = (float(c) for c in p)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"not a 2D point: {p!r}") from exc
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"non-finite coordinate in {p!r}")
    return Point2(x, y)


@dataclass(frozen=True)
class Segment:
    a: Point2
    b: Point2

    def __post_init__(self):
        a, b = _as_point(self.a), _as_point(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a == b:
            raise ValidationError(f"zero-length segment at {tuple(a)}")

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)

    @property
    def angle(self) -> float:
        """Direction modulo pi, in ``[0, pi)``."""
        return canonical_direction(math.atan2(self.b.y - self.a.y, self.b.x - self.a.x))

    @property
    def normal(self) -> Point2:
        dx, dy = self.b.x - self.a.x, self.b.y - self.a.y
        n = math.hypot(dx, dy)
        return Point2(-dy / n, dx / n)

    @property
    def midpoint(self) -> Point2:
        return Point2(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=float)


def canonical_direction(angle: float) -> float:
    """Reduce an angle to ``[0, pi)``, snapping values within tolerance of pi to 0."""
    a = math.fmod(angle, math.pi)
    if a < 0:
        a += math.pi
    if math.pi - a <= ANGLE_TOL:
        a = 0.0
    return a


def canonical_angles(angles) -> np.ndarray:
    """Reduce angles to ``[0, 2 pi)`` with wraparound snapping."""
    a = np.mod(np.asarray(angles, dtype=float), TWO_PI)
    a[TWO_PI - a <= ANGLE_TOL] = 0.0
    return a


class SegmentSet:
    """An immutable, possibly empty, finite collection of segments."""

    def __init__(self, segments: Iterable[Segment | Sequence] = ()):
        segs = []
        for s in segments:
            if not isinstance(s, Segment):
                s = Segment(*s)
            segs.append(s)
        self._segments = tuple(segs)
        if segs:
            arr = np.array([[s.a, s.b] for s in segs], dtype=float)
        else:
            arr = np.zeros((0, 2, 2))
        arr.setflags(write=False)
        self._endpoints = arr

    @classmethod
    def from_array(cls, endpoints) -> "SegmentSet":
        arr = np.asarray(endpoints, dtype=float).reshape(-1, 2, 2)
        return cls(Segment(tuple(e[0]), tuple(e[1])) for e in arr)

    @property
    def endpoints(self) -> np.ndarray:
        """Array of shape ``(n, 2, 2)``: segment, endpoint, coordinate."""
        return self._endpoints

    @property
    def lengths(self) -> np.ndarray:
        d = self._endpoints[:, 1] - self._endpoints[:, 0]
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def angles(self) -> np.ndarray:
        return np.array([s.angle for s in self._segments])

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    def __len__(self) -> int:
        return len(self._segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self._segments)

    def __getitem__(self, i) -> Segment:
        return self._segments[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, SegmentSet) and self._segments == other._segments

    def __repr__(self) -> str:
        return f"SegmentSet(n={len(self)}, length={self.total_length:.6g})"

    def transformed(self, matrix=None, offset=(0.0, 0.0)) -> "SegmentSet":
        """Apply ``p -> matrix @ p + offset`` to every endpoint."""
        pts = self._endpoints.reshape(-1, 2)
        if matrix is not None:
            pts = pts @ np.asarray(matrix, dtype=float).T
        pts = pts + np.asarray(offset, dtype=float)
        return SegmentSet.from_array(pts)

    def __add__(self, other: "SegmentSet") -> "SegmentSet":
        return SegmentSet(self._segments + tuple(other))


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """A convex polygon stored with counterclockwise vertices.

    Clockwise input is reversed. Consecutive collinear vertices are merged.
    Repeated consecutive vertices, fewer than three distinct corners, zero
    area, reflex corners and self-overlapping windings are rejected.
    """

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _validate_polygon(self.vertices))

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexPolygon) and np.array_equal(self.vertices, other.vertices)

    def __repr__(self) -> str:
        return f"ConvexPolygon(n={len(self.vertices)}, perimeter={self.perimeter:.6g})"

    @property
    def edges(self) -> np.ndarray:
        """Edge vectors ``v[i+1] - v[i]`` (cyclic)."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.hypot(e[:, 0], e[:, 1])

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @property
    def area(self) -> float:
        return 0.5 * _signed_area(self.vertices)

    @property
    def bbox_center(self) -> np.ndarray:
        return 0.5 * (self.vertices.min(axis=0) + self.vertices.max(axis=0))

    @property
    def bounding_radius(self) -> float:
        d = self.vertices - self.bbox_center
        return float(np.hypot(d[:, 0], d[:, 1]).max())

    def boundary_segments(self) -> SegmentSet:
        v = self.vertices
        return SegmentSet.from_array(np.stack([v, np.roll(v, -1, axis=0)], axis=1))

    def transformed(self, matrix=None, offset=(0.0, 0.0)) -> "ConvexPolygon":
        pts = self.vertices
        if matrix is not None:
            pts = pts @ np.asarray(matrix, dtype=float).T
        return ConvexPolygon(pts + np.asarray(offset, dtype=float))

    def support(self, thetas):
        """Vectorized support interval endpoints ``(lo, hi)`` over ``thetas``."""
        return projection_range(self.vertices, thetas)

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        return point_in_convex(points, self.vertices, tol)


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _validate_polygon(vertices) -> np.ndarray:
    try:
        v = np.array(vertices, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"polygon vertices are not numeric: {exc}") from exc
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValidationError(f"polygon vertices must have shape (n, 2), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("polygon has non-finite coordinates")
    if len(v) < 3:
        raise ValidationError(f"polygon needs at least 3 vertices, got {len(v)}")
    nxt = np.roll(v, -1, axis=0)
    if np.any(np.all(v == nxt, axis=1)):
        raise ValidationError("polygon has repeated consecutive vertices")
    area2 = _signed_area(v)
    scale = float(np.abs(v - v.mean(axis=0)).max())
    if abs(area2) <= 1e-12 * scale**2:
        raise ValidationError("polygon has zero area")
    if area2 < 0:
        v = v[::-1].copy()

    # Drop vertices where the boundary continues straight on.
    changed = True
    while changed and len(v) >= 3:
        changed = False
        prev = np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0)
        e1, e2 = v - prev, nxt - v
        cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        dot = np.einsum("ij,ij->i", e1, e2)
        n1, n2 = np.hypot(*e1.T), np.hypot(*e2.T)
        flat = np.abs(cross) <= ANGLE_TOL * n1 * n2
        if np.any(flat & (dot < 0)):
            raise ValidationError("polygon boundary folds back on itself")
        if np.any(flat):
            i = int(np.flatnonzero(flat)[0])
            v = np.delete(v, i, axis=0)
            changed = True
    if len(v) < 3:
        raise ValidationError("polygon is degenerate after merging collinear vertices")

    prev = np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0)
    e1, e2 = v - prev, nxt - v
    cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(cross < 0):
        raise ValidationError("polygon is not convex")
    turning = np.arctan2(cross, np.einsum("ij,ij->i", e1, e2)).sum()
    if abs(turning - TWO_PI) > 1e-6:
        raise ValidationError("polygon winds more than once")
    v.setflags(write=False)
    return v


def projection_range(points, thetas):
    """Min and max of ``<p, u(theta)>`` over ``points`` for every theta."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    lo = np.empty(th.shape)
    hi = np.empty(th.shape)
    step = max(1, _BLOCK_ELEMENTS // max(len(pts), 1))
    for start in range(0, len(th), step):
        t = th[start:start + step]
        proj = np.outer(pts[:, 0], np.cos(t)) + np.outer(pts[:, 1], np.sin(t))
        lo[start:start + step] = proj.min(axis=0)
        hi[start:start + step] = proj.max(axis=0)
    if np.ndim(thetas) == 0:
        return float(lo[0]), float(hi[0])
    return lo, hi


def support_interval(poly: ConvexPolygon, theta: float) -> Interval:
    lo, hi = projection_range(poly.vertices, float(theta))
    return Interval(lo, hi)


def width(poly: ConvexPolygon, theta):
    """Width of ``poly`` in direction ``theta`` (scalar or array)."""
    lo, hi = projection_range(poly.vertices, theta)
    return hi - lo


def segment_projection(seg: Segment, theta: float) -> Interval:
    u = (math.cos(theta), math.sin(theta))
    pa = seg.a.x * u[0] + seg.a.y * u[1]
    pb = seg.b.x * u[0] + seg.b.y * u[1]
    return Interval(min(pa, pb), max(pa, pb))


def perimeter(poly: ConvexPolygon) -> float:
    return poly.perimeter


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


# ---------------------------------------------------------------- hulls

def convex_hull(points) -> np.ndarray:
    """Counterclockwise hull vertices (Andrew's monotone chain).

    Degenerate inputs return one or two points.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 2:
        hull = pts[[0, -1]]
    return hull


def point_segment_distance(points, a, b) -> np.ndarray:
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    dd = float(d @ d)
    if dd == 0.0:
        t = np.zeros(len(p))
    else:
        t = np.clip((p - a) @ d / dd, 0.0, 1.0)
    q = a + t[:, None] * d
    return np.hypot(*(p - q).T)


def point_in_convex(points, hull, tol: float = 1e-12) -> np.ndarray:
    """Whether each point lies in the closed convex hull, within ``tol``.

    ``hull`` is a counterclockwise vertex list; one- and two-point hulls are
    handled as a point and a segment.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    h = np.asarray(hull, dtype=float).reshape(-1, 2)
    if len(h) == 1:
        return np.hypot(*(p - h[0]).T) <= tol
    if len(h) == 2:
        return point_segment_distance(p, h[0], h[1]) <= tol
    e = np.roll(h, -1, axis=0) - h
    n = np.hypot(*e.T)
    rel = p[:, None, :] - h[None, :, :]
    signed = (e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]) / n[None, :]
    inside = np.all(signed >= -tol, axis=1)
    if np.all(inside):
        return inside
    # Points just outside a corner: fall back to the true distance.
    out = np.flatnonzero(~inside)
    near = np.full(len(out), np.inf)
    for i in range(len(h)):
        near = np.minimum(near, point_segment_distance(p[out], h[i], h[(i + 1) % len(h)]))
    inside[out] = near <= tol
    return inside


def segment_distance(p1, p2, q1, q2) -> np.ndarray:
    """Vectorized distance between segments ``p1p2`` and ``q1q2`` (broadcasting)."""
    p1, p2, q1, q2 = (np.asarray(x, dtype=float) for x in (p1, p2, q1, q2))
    d1, d2 = p2 - p1, q2 - q1

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    def pt_seg(p, a, d):
        dd = np.einsum("...i,...i->...", d, d)
        safe = np.where(dd > 0, dd, 1.0)
        t = np.clip(np.einsum("...i,...i->...", p - a, d) / safe, 0.0, 1.0)
        t = np.where(dd > 0, t, 0.0)
        diff = p - (a + t[..., None] * d)
        return np.hypot(diff[..., 0], diff[..., 1])

    dist = np.minimum.reduce([
        pt_seg(p1, q1, d2), pt_seg(p2, q1, d2), pt_seg(q1, p1, d1), pt_seg(q2, p1, d1),
    ])
    # Proper crossings.
    o1 = cross(d1, q1 - p1)
    o2 = cross(d1, q2 - p1)
    o3 = cross(d2, p1 - q1)
    o4 = cross(d2, p2 - q1)
    crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(crossing, 0.0, dist)


def hull_edges(hull: np.ndarray) -> np.ndarray:
    h = np.asarray(hull, dtype=float).reshape(-1, 2)
    if len(h) == 1:
        return np.stack([h, h], axis=1)
    if len(h) == 2:
        return h[None]
    return np.stack([h, np.roll(h, -1, axis=0)], axis=1)


def hulls_intersect(h1, h2, tol: float = 1e-12) -> bool:
    """Whether two convex hulls (possibly degenerate) meet within ``tol``."""
    if np.any(point_in_convex(h1, h2, tol)) or np.any(point_in_convex(h2, h1, tol)):
        return True
    e1, e2 = hull_edges(h1), hull_edges(h2)
    d = segment_distance(e1[:, None, 0], e1[:, None, 1], e2[None, :, 0], e2[None, :, 1])
    return bool(np.any(d <= tol))
