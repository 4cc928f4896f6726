"""Certified opacity checking.

A line is written ``{p : <p, u(theta)> = offset}`` with ``theta`` in ``[0, pi)``.
For a fixed ``theta`` the lines meeting the domain are the offsets in its
support interval, and a segment blocks exactly the offsets in its projection,
so opacity is an interval-covering question for every direction.

The checker first groups the segments into connected pieces; a connected
piece blocks every line meeting its convex hull. Pieces whose hulls touch are
merged, since their projections then overlap in every direction. If one hull
contains the domain the scene is opaque outright. Otherwise directions are
swept on a grid ``theta_k = k pi / n``; each grid angle stands for the cell
``|theta - theta_k| <= pi / (2 n)``, across which every projected point moves
by at most ``s = R pi / (2 n)`` (``R`` = scene radius about the domain's
bounding-box center). A cell is certified when the covering holds with
``2 s`` to spare, except that a domain vertex inside a hull is covered by that
hull exactly. Cells that are neither certified nor show a gap are split in two,
up to ``max_refinements`` times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ParameterError
from .geometry import (
    ConvexPolygon, Interval, SegmentSet, convex_hull, hulls_intersect, point_in_convex,
    projection_range, segment_distance,
)

CERTIFIED = "certified_opaque"
NON_OPAQUE = "non_opaque"
INCONCLUSIVE = "inconclusive"

DEFAULT_N_SWEEP = 65536
DEFAULT_MAX_REFINEMENTS = 4
COORD_TOL = 1e-12

_BLOCK_ELEMENTS = 2_000_000


@dataclass(frozen=True)
class OpacityCertificate:
    verdict: str
    witness: tuple[float, float] | None
    n_sweep: int
    refinements: int
    slack: float
    min_margin: float
    method: str
    n_components: int
    unresolved_cells: int = 0

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED


class Coverage(NamedTuple):
    uncovered_length: float
    largest_gap: Interval | None


def _union_gaps(lo: float, hi: float, intervals) -> list[tuple[float, float]]:
    """Open gaps of ``[lo, hi]`` left by a union of closed intervals."""
    gaps = []
    cursor = lo
    for a, b in sorted(intervals):
        if a > cursor:
            gaps.append((cursor, min(a, hi)))
        cursor = max(cursor, b)
        if cursor >= hi:
            break
    if cursor < hi:
        gaps.append((cursor, hi))
    return [(a, b) for a, b in gaps if b > a]


def coverage_margin(poly: ConvexPolygon, segs: SegmentSet, theta: float) -> Coverage:
    lo, hi = projection_range(poly.vertices, float(theta))
    u = np.array([math.cos(theta), math.sin(theta)])
    if len(segs):
        proj = segs.endpoints @ u
        intervals = list(zip(proj.min(axis=1).tolist(), proj.max(axis=1).tolist()))
    else:
        intervals = []
    gaps = _union_gaps(lo, hi, intervals)
    if not gaps:
        return Coverage(0.0, None)
    total = sum(b - a for a, b in gaps)
    a, b = max(gaps, key=lambda g: g[1] - g[0])
    return Coverage(total, Interval(a, b))


def _scale(points) -> float:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return max(1.0, float(np.abs(pts).max())) if len(pts) else 1.0


def witness_check(poly: ConvexPolygon, segs: SegmentSet, theta: float, offset: float,
                  tol: float = COORD_TOL) -> bool:
    """True iff the line ``<p, u(theta)> = offset`` meets the closed domain and
    misses every segment, with signed distances compared at tolerance ``tol``
    (scaled by the coordinate magnitude)."""
    tol = tol * max(_scale(poly.vertices), _scale(segs.endpoints), abs(offset))
    u = np.array([math.cos(theta), math.sin(theta)])
    dv = poly.vertices @ u - offset
    if dv.min() > tol or dv.max() < -tol:
        return False
    if len(segs) == 0:
        return True
    d = segs.endpoints @ u - offset
    hits = (d.min(axis=1) <= tol) & (d.max(axis=1) >= -tol)
    return not bool(hits.any())


def segment_components(endpoints: np.ndarray, tol: float) -> list[np.ndarray]:
    """Indices of segments grouped into touching (connected) pieces."""
    n = len(endpoints)
    if n == 0:
        return []
    a, b = endpoints[:, 0], endpoints[:, 1]
    d = segment_distance(a[:, None], b[:, None], a[None, :], b[None, :])
    _, labels = connected_components(csr_matrix(d <= tol), directed=False)
    return [np.flatnonzero(labels == k) for k in range(labels.max() + 1)]


def blocking_hulls(endpoints: np.ndarray, tol: float) -> list[np.ndarray]:
    """Convex hulls whose union of projections equals that of the segments.

    Connected pieces are replaced by their hulls, then hulls that meet are
    merged until all are pairwise disjoint.
    """
    hulls = [convex_hull(endpoints[idx].reshape(-1, 2)) for idx in segment_components(endpoints, tol)]
    merged = True
    while merged:
        merged = False
        for i in range(len(hulls)):
            for j in range(i + 1, len(hulls)):
                if hulls_intersect(hulls[i], hulls[j], tol):
                    hulls[i] = convex_hull(np.vstack([hulls[i], hulls[j]]))
                    del hulls[j]
                    merged = True
                    break
            if merged:
                break
    return hulls


class _Sweep:
    """Recentered scene with the per-cell tests used by :func:`verify`."""

    def __init__(self, poly: ConvexPolygon, segs: SegmentSet):
        self.center = poly.bbox_center
        self.V = poly.vertices - self.center
        E = segs.endpoints - self.center
        pts = np.vstack([self.V, E.reshape(-1, 2)])
        self.R = float(np.hypot(pts[:, 0], pts[:, 1]).max())
        self.tol = COORD_TOL * max(1.0, self.R)
        self.hulls = blocking_hulls(E, self.tol)
        self.inside = np.array([point_in_convex(self.V, h, self.tol) for h in self.hulls]).reshape(
            len(self.hulls), len(self.V))
        self.hull_points = np.vstack(self.hulls) if self.hulls else np.zeros((0, 2))
        self.starts = np.cumsum([0] + [len(h) for h in self.hulls[:-1]])

    @property
    def m(self) -> int:
        return len(self.hulls)

    def _project(self, t: np.ndarray):
        U = np.stack([np.cos(t), np.sin(t)])
        Vp = self.V @ U
        Hp = self.hull_points @ U
        P = np.minimum.reduceat(Hp, self.starts, axis=0).T
        Q = np.maximum.reduceat(Hp, self.starts, axis=0).T
        return Vp.T, P, Q

    def _chunks(self, n: int):
        step = max(1, _BLOCK_ELEMENTS // max(1, self.m * self.m * len(self.V), len(self.hull_points)))
        for s0 in range(0, n, step):
            yield slice(s0, min(n, s0 + step))

    def gaps(self, thetas: np.ndarray):
        """Largest exact uncovered gap (length, midpoint) at each angle."""
        gap_len = np.empty(len(thetas))
        gap_mid = np.empty(len(thetas))
        for sl in self._chunks(len(thetas)):
            Vp, P, Q = self._project(thetas[sl])
            gap_len[sl], gap_mid[sl] = _largest_gaps(Vp.min(axis=1), Vp.max(axis=1), P, Q)
        return gap_len, gap_mid

    def certify(self, thetas: np.ndarray, half_width: float):
        """Robust certification of every cell; returns (certified, margin)."""
        n = len(thetas)
        slack = 2.0 * self.R * half_width
        margin = np.empty(n)
        certified = np.zeros(n, dtype=bool)
        inside = self.inside[None]
        for sl in self._chunks(n):
            Vp, P, Q = self._project(thetas[sl])
            low = Vp[:, None, :] - P[:, :, None]
            up = Q[:, :, None] - Vp[:, None, :]
            best = np.where(inside, np.inf, np.minimum(low, up)).min(axis=2).max(axis=1)
            margin[sl] = best
            ok = best >= slack
            rest = np.flatnonzero(~ok)
            if len(rest):
                low_ok = inside | (low[rest] >= slack)
                up_ok = inside | (up[rest] >= slack)
                ok[rest] = _chain_certified(P[rest], Q[rest], low_ok, up_ok, slack)
                for r in rest[~ok[rest]]:
                    ok[r] = self._group_certified(P[r], Q[r], Vp[r], slack)
            certified[sl] = ok
        return certified, margin

    def _group_certified(self, P, Q, Vp, slack) -> bool:
        overlap = np.minimum(Q[:, None] - P[None, :], Q[None, :] - P[:, None]) >= slack
        np.fill_diagonal(overlap, True)
        k, labels = connected_components(csr_matrix(overlap), directed=False)
        low_ok = self.inside | (Vp[None, :] - P[:, None] >= slack)
        up_ok = self.inside | (Q[:, None] - Vp[None, :] >= slack)
        for g in range(k):
            members = labels == g
            if low_ok[members].any(axis=0).all() and up_ok[members].any(axis=0).all():
                return True
        return False


def _chain_certified(P, Q, low_ok, up_ok, slack):
    """Vectorized group test: hulls sorted by lower end are chained into
    blocks whenever a hull overlaps the block's furthest-reaching member by
    ``slack`` on both sides; a block certifies the cell if it reaches below
    and above every domain vertex."""
    rows, m = P.shape
    order = np.argsort(P, axis=1)
    Ps = np.take_along_axis(P, order, axis=1)
    Qs = np.take_along_axis(Q, order, axis=1)
    run_arg = np.zeros((rows, m), dtype=int)
    for i in range(1, m):
        prev = run_arg[:, i - 1]
        run_arg[:, i] = np.where(Qs[:, i] > Qs[np.arange(rows), prev], i, prev)
    r = np.arange(rows)[:, None]
    prev_arg = run_arg[:, :-1]
    link = ((Qs[r, prev_arg] - Ps[:, 1:] >= slack)
            & (Qs[:, 1:] - Ps[r, prev_arg] >= slack))
    block_sorted = np.concatenate([np.zeros((rows, 1), dtype=int), np.cumsum(~link, axis=1)], axis=1)
    block = np.empty_like(block_sorted)
    np.put_along_axis(block, order, block_sorted, axis=1)
    onehot = (block[:, :, None] == np.arange(m)[None, None, :]).astype(float)
    low_cov = np.einsum("rcb,rcv->rbv", onehot, low_ok.astype(float)) > 0
    up_cov = np.einsum("rcb,rcv->rbv", onehot, up_ok.astype(float)) > 0
    return np.any(low_cov.all(axis=2) & up_cov.all(axis=2), axis=1)


def _largest_gaps(lo, hi, P, Q):
    """Largest open gap of ``[lo, hi]`` not covered by ``[P, Q]`` rows."""
    order = np.argsort(P, axis=1)
    Ps = np.take_along_axis(P, order, axis=1)
    Qs = np.take_along_axis(Q, order, axis=1)
    run = np.maximum.accumulate(Qs, axis=1)
    left = np.concatenate([lo[:, None], run], axis=1)
    right = np.concatenate([Ps, hi[:, None]], axis=1)
    a = np.maximum(left, lo[:, None])
    b = np.minimum(right, hi[:, None])
    length = b - a
    k = np.argmax(length, axis=1)
    rows = np.arange(len(lo))
    best = np.maximum(length[rows, k], 0.0)
    return best, 0.5 * (a[rows, k] + b[rows, k])


def verify(poly: ConvexPolygon, segs: SegmentSet, n_sweep: int = DEFAULT_N_SWEEP,
           max_refinements: int = DEFAULT_MAX_REFINEMENTS) -> OpacityCertificate:
    if int(n_sweep) != n_sweep or n_sweep < 64:
        raise ParameterError(f"n_sweep must be an integer >= 64, got {n_sweep}")
    if max_refinements < 0:
        raise ParameterError("max_refinements must be non-negative")
    n_sweep = int(n_sweep)

    if len(segs) == 0:
        lo, hi = projection_range(poly.vertices, 0.0)
        return OpacityCertificate(NON_OPAQUE, (0.0, 0.5 * (lo + hi)), n_sweep, 0, 0.0,
                                  -(hi - lo), "empty", 0)

    sweep = _Sweep(poly, segs)
    if np.any(sweep.inside.all(axis=1)):
        return OpacityCertificate(CERTIFIED, None, n_sweep, 0, 0.0, math.inf, "hull", sweep.m)

    half = math.pi / (2 * n_sweep)
    base_slack = 2.0 * sweep.R * half
    pending = math.pi * np.arange(n_sweep) / n_sweep
    worst = math.inf
    level = 0
    while True:
        gap_len, gap_mid = sweep.gaps(pending)
        witness = _pick_witness(poly, segs, sweep, pending, gap_len, gap_mid)
        if witness is not None:
            return OpacityCertificate(NON_OPAQUE, witness, n_sweep, level, base_slack,
                                      -float(gap_len.max()), "sweep", sweep.m)
        certified, margin = sweep.certify(pending, half)
        worst = min(worst, float(margin.min()))
        unresolved = pending[~certified]
        if len(unresolved) == 0:
            return OpacityCertificate(CERTIFIED, None, n_sweep, level, base_slack, worst,
                                      "sweep", sweep.m)
        if level == max_refinements:
            return OpacityCertificate(INCONCLUSIVE, None, n_sweep, level, base_slack, worst,
                                      "sweep", sweep.m, len(unresolved))
        half /= 2.0
        pending = np.sort(np.concatenate([unresolved - half, unresolved + half]))
        level += 1


def _pick_witness(poly, segs, sweep: _Sweep, thetas, gap_len, gap_mid):
    """Validated witness from the widest gap (ties: smallest angle)."""
    candidates = np.flatnonzero(gap_len > 4 * sweep.tol)
    if len(candidates) == 0:
        return None
    order = candidates[np.lexsort((thetas[candidates], -gap_len[candidates]))]
    for r in order[:32]:
        theta = float(thetas[r])
        offset = float(gap_mid[r] + sweep.center @ np.array([math.cos(theta), math.sin(theta)]))
        if theta < 0:
            # u(theta + pi) = -u(theta): same line with the normal in [0, pi).
            theta, offset = theta + math.pi, -offset
        if witness_check(poly, segs, theta, offset):
            return theta, offset
    return None
