"""Named scenes (domain plus candidate barrier) and seeded random scenes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError, ValidationError
from .geometry import ConvexPolygon, SegmentSet, convex_hull


@dataclass(frozen=True)
class SceneSpec:
    name: str
    domain: ConvexPolygon
    segments: SegmentSet
    expected_length: float | None = None
    expected_opaque: bool | None = None

    def __post_init__(self):
        if self.expected_length is not None:
            actual = self.segments.total_length
            if abs(actual - self.expected_length) > 1e-9 * max(1.0, abs(actual)):
                raise ValidationError(
                    f"{self.name}: segments have length {actual!r}, expected {self.expected_length!r}")

    @property
    def length(self) -> float:
        return self.segments.total_length

    def with_segments(self, segments: SegmentSet, name: str | None = None) -> "SceneSpec":
        return SceneSpec(name or self.name, self.domain, segments)

    def transformed(self, matrix=None, offset=(0.0, 0.0), name: str | None = None) -> "SceneSpec":
        return SceneSpec(name or self.name, self.domain.transformed(matrix, offset),
                         self.segments.transformed(matrix, offset))


def unit_square() -> ConvexPolygon:
    return ConvexPolygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def rectangle(w: float, h: float) -> ConvexPolygon:
    return ConvexPolygon([(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)])


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> ConvexPolygon:
    k = np.arange(n)
    ang = phase + 2.0 * math.pi * k / n
    return ConvexPolygon(np.column_stack([radius * np.cos(ang), radius * np.sin(ang)]))


def equilateral_triangle(side: float = 1.0) -> ConvexPolygon:
    return ConvexPolygon([(0.0, 0.0), (side, 0.0), (0.5 * side, 0.5 * math.sqrt(3.0) * side)])


STEINER_T = (3.0 - math.sqrt(3.0)) / 6.0


def square_conjectured() -> SceneSpec:
    """Half-diagonal plus the Steiner tree on three corners of the unit square."""
    t = STEINER_T
    p = (t, t)
    segs = SegmentSet([
        ((0.5, 0.5), (1.0, 1.0)),
        ((0.0, 0.0), p),
        ((1.0, 0.0), p),
        ((0.0, 1.0), p),
    ])
    return SceneSpec("square-conjectured", unit_square(), segs,
                     math.sqrt(2.0) + math.sqrt(1.5), True)


def square_boundary() -> SceneSpec:
    sq = unit_square()
    return SceneSpec("square-boundary", sq, sq.boundary_segments(), 4.0, True)


def square_two_sides() -> SceneSpec:
    """Top and bottom sides only; horizontal lines between them get through."""
    segs = SegmentSet([((0.0, 0.0), (1.0, 0.0)), ((0.0, 1.0), (1.0, 1.0))])
    return SceneSpec("square-two-sides", unit_square(), segs, 2.0, False)


def triangle_tripod(side: float = 1.0) -> SceneSpec:
    if not side > 0:
        raise ParameterError(f"side must be positive, got {side}")
    tri = equilateral_triangle(side)
    c = tri.vertices.mean(axis=0)
    segs = SegmentSet([(tuple(v), tuple(c)) for v in tri.vertices])
    return SceneSpec("triangle-tripod", tri, segs, side * math.sqrt(3.0), True)


def rectangle_three_sides(w: float = 1.0, h: float = 0.01) -> SceneSpec:
    """Both short sides plus one long side of a ``w x h`` rectangle."""
    if not (w > 0 and h > 0):
        raise ParameterError("rectangle sides must be positive")
    dom = rectangle(w, h)
    if w >= h:
        segs = [((0.0, 0.0), (0.0, h)), ((w, 0.0), (w, h)), ((0.0, 0.0), (w, 0.0))]
        length = w + 2.0 * h
    else:
        segs = [((0.0, 0.0), (w, 0.0)), ((0.0, h), (w, h)), ((0.0, 0.0), (0.0, h))]
        length = h + 2.0 * w
    return SceneSpec("rectangle-three-sides", dom, SegmentSet(segs), length, True)


def disk_half_circle_whiskers(n_arc: int = 1024) -> SceneSpec:
    """Lower semicircle as ``n_arc`` chords plus unit whiskers up from ``(+-1, 0)``.

    The domain is the regular ``2 n_arc``-gon whose lower edges are exactly
    the chords, so the barrier is opaque for the polygon (a subset of the disk).
    """
    if int(n_arc) != n_arc or n_arc < 64:
        raise ParameterError(f"n_arc must be an integer >= 64, got {n_arc}")
    n_arc = int(n_arc)
    dom = regular_polygon(2 * n_arc)
    v = dom.vertices
    arc = np.vstack([v[n_arc:], v[:1]])
    chords = np.stack([arc[:-1], arc[1:]], axis=1)
    whiskers = np.array([[[1.0, 0.0], [1.0, 1.0]], [[-1.0, 0.0], [-1.0, 1.0]]])
    segs = SegmentSet.from_array(np.concatenate([chords, whiskers]))
    length = 2.0 * n_arc * math.sin(math.pi / (2 * n_arc)) + 2.0
    return SceneSpec("disk-whiskers", dom, segs, length, True)


class SplitMix64:
    """Portable 64-bit generator (SplitMix64, Steele, Lea and Flood).

    ``state += 0x9E3779B97F4A7C15``; output mixes with multipliers
    ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB`` and shifts 30, 27, 31.
    Uniform doubles take the top 53 bits.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def point_in_disk(self, radius: float = 1.0) -> tuple[float, float]:
        r = radius * math.sqrt(self.uniform())
        a = self.uniform(0.0, 2.0 * math.pi)
        return r * math.cos(a), r * math.sin(a)


def random_scene(seed: int, n_vertices: int = 8, n_segments: int = 6, *,
                 include_boundary: bool = False, segment_radius: float = 1.2,
                 max_retries: int = 100) -> SceneSpec:
    """Convex hull of ``n_vertices`` uniform points in the unit disk, plus
    ``n_segments`` segments with endpoints uniform in a wider disk.

    With ``include_boundary`` the polygon edges are added to the segments,
    which makes the scene opaque.
    """
    if n_vertices < 3:
        raise ParameterError("n_vertices must be at least 3")
    rng = SplitMix64(seed)
    for _ in range(max_retries):
        pts = np.array([rng.point_in_disk() for _ in range(n_vertices)])
        hull = convex_hull(pts)
        if len(hull) < 3:
            continue
        try:
            dom = ConvexPolygon(hull)
        except ValidationError:
            continue
        if dom.area > 1e-3:
            break
    else:
        raise ValidationError(f"seed {seed}: no usable polygon after {max_retries} draws")
    segs = []
    while len(segs) < n_segments:
        a, b = rng.point_in_disk(segment_radius), rng.point_in_disk(segment_radius)
        if math.hypot(a[0] - b[0], a[1] - b[1]) > 1e-6:
            segs.append((a, b))
    segments = SegmentSet(segs)
    if include_boundary:
        segments = segments + dom.boundary_segments()
    return SceneSpec(f"random-{seed}", dom, segments, None, True if include_boundary else None)


GENERATORS: dict[str, Callable[..., SceneSpec]] = {
    "square-conjectured": square_conjectured,
    "square-boundary": square_boundary,
    "square-two-sides": square_two_sides,
    "triangle-tripod": triangle_tripod,
    "rectangle-three-sides": rectangle_three_sides,
    "disk-whiskers": disk_half_circle_whiskers,
    "random": random_scene,
}


def figure_scenes() -> list[SceneSpec]:
    return [square_conjectured(), triangle_tripod(1.0), rectangle_three_sides(1.0, 0.01),
            disk_half_circle_whiskers(1024)]
