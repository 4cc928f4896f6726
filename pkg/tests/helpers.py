"""Independent oracles shared by the test modules."""
import math

import numpy as np

from opaqueset.constructions import random_scene
from opaqueset.geometry import ConvexPolygon, SegmentSet


def random_lines_hit(poly: ConvexPolygon, segs: SegmentSet, n: int, seed: int) -> int:
    """Count random lines meeting ``poly`` that miss every segment."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, math.pi, n)
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    pv = poly.vertices @ u.T
    offset = rng.uniform(pv.min(axis=0), pv.max(axis=0))
    missed = 0
    step = max(1, 4_000_000 // max(2 * len(segs), 1))
    for start in range(0, n, step):
        sl = slice(start, start + step)
        d = np.einsum("sek,nk->nse", segs.endpoints, u[sl]) - offset[sl, None, None]
        hit = ((d.min(axis=2) <= 0) & (d.max(axis=2) >= 0)).any(axis=1)
        missed += int((~hit).sum())
    return missed


def opaque_random(seed: int):
    return random_scene(seed, include_boundary=True)


def width_oracle(vertices, theta: float) -> float:
    """Width by projecting every vertex one at a time."""
    c, s = math.cos(theta), math.sin(theta)
    proj = [x * c + y * s for x, y in vertices]
    return max(proj) - min(proj)


def h_minus2_oracle(atoms1, atoms2, ell_max: int) -> float:
    """Squared truncated H^-2 distance by explicit double loops over +-ell."""
    total = 0.0
    for ell in range(-ell_max, ell_max + 1):
        if ell == 0:
            continue
        c = sum(m * complex(math.cos(ell * a), -math.sin(ell * a)) for a, m in atoms1)
        c -= sum(m * complex(math.cos(ell * a), -math.sin(ell * a)) for a, m in atoms2)
        total += abs(c) ** 2 / ell**4
    return total / (2.0 * math.pi)


def crofton_midpoint_oracle(p, q, n: int = 10_000, block: int = 500) -> float:
    """Ordered-pair energy of two segments by an n x n midpoint rule."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    d1, d2 = p[1] - p[0], q[1] - q[0]
    l1, l2 = math.hypot(*d1), math.hypot(*d2)
    n1 = np.array([-d1[1], d1[0]]) / l1
    n2 = np.array([-d2[1], d2[0]]) / l2
    s = (np.arange(n) + 0.5) / n
    x = p[0] + s[:, None] * d1
    y = q[0] + s[:, None] * d2
    total = 0.0
    for start in range(0, n, block):
        r = y[None, :, :] - x[start:start + block, None, :]
        dist = np.hypot(r[..., 0], r[..., 1])
        total += float(np.sum(np.abs((r @ n1) * (r @ n2)) / dist**3))
    return 2.0 * total * (l1 / n) * (l2 / n)
