"""Greedy local search that shortens a barrier while keeping it certified."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constructions import SceneSpec
from .errors import ParameterError, PreconditionError
from .geometry import SegmentSet
from .measures import measure_of_boundary
from .opacity import DEFAULT_MAX_REFINEMENTS, DEFAULT_N_SWEEP, verify


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    max_iters: int = 300
    step_initial: float = 0.1
    step_decay: float = 0.99
    step_min: float = 1e-4
    delete_probability: float = 0.1
    shrink_probability: float = 0.3
    bias_weight: float = 0.0
    n_sweep: int = 8192
    final_sweep: int = DEFAULT_N_SWEEP
    max_refinements: int = DEFAULT_MAX_REFINEMENTS
    n_restarts: int = 1

    def __post_init__(self):
        if self.max_iters < 0 or self.n_restarts < 1:
            raise ParameterError("max_iters must be >= 0 and n_restarts >= 1")
        if not (self.step_initial > 0 and self.step_min > 0 and 0 < self.step_decay <= 1):
            raise ParameterError("step sizes must be positive and decay in (0, 1]")
        for p in (self.delete_probability, self.shrink_probability, self.bias_weight):
            if not 0.0 <= p <= 1.0:
                raise ParameterError(f"probabilities and bias weight must lie in [0, 1], got {p}")
        if self.delete_probability + self.shrink_probability > 1.0:
            raise ParameterError("delete and shrink probabilities sum above 1")

    def step(self, it: int) -> float:
        return max(self.step_initial * self.step_decay**it, self.step_min)


def _total_length(ends: np.ndarray) -> float:
    return float(np.hypot(*(ends[:, 1] - ends[:, 0]).T).sum())


def _nearest_boundary_direction(alpha: float, boundary_angles: np.ndarray) -> float:
    """Signed rotation taking ``alpha`` to the closest boundary direction mod pi."""
    diff = (boundary_angles - alpha + math.pi / 2) % math.pi - math.pi / 2
    return float(diff[np.argmin(np.abs(diff))])


def _propose(ends: np.ndarray, rng: np.random.Generator, step: float, cfg: SearchConfig,
             boundary_angles: np.ndarray) -> tuple[str, np.ndarray]:
    n = len(ends)
    u = rng.random()
    k = int(rng.integers(n))
    out = ends.copy()
    if u < cfg.delete_probability and n > 1:
        return "delete", np.delete(out, k, axis=0)
    if u < cfg.delete_probability + cfg.shrink_probability:
        a, b = out[k]
        mid = 0.5 * (a + b)
        frac = min(1.0, step / max(float(np.hypot(*(b - a))), 1e-300)) * rng.random()
        out[k] = mid + (1.0 - frac) * (out[k] - mid)
        return "shrink", out
    e = int(rng.integers(2))
    p = out[k, e].copy()
    q = p + step * rng.standard_normal(2)
    if cfg.bias_weight > 0.0:
        # Rotate the moved endpoint about the segment's other end toward the
        # nearest domain-edge direction.
        other = out[k, 1 - e]
        vec = q - other
        turn = cfg.bias_weight * _nearest_boundary_direction(math.atan2(vec[1], vec[0]) % math.pi,
                                                             boundary_angles)
        c, s = math.cos(turn), math.sin(turn)
        q = other + np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])
    # Move every endpoint sitting on the chosen joint so connectivity is kept.
    joint = np.all(np.abs(out - p) <= 1e-12, axis=-1)
    out[joint] = q
    return "perturb", out


def _clean(ends: np.ndarray) -> np.ndarray:
    keep = np.hypot(*(ends[:, 1] - ends[:, 0]).T) > 1e-9
    return ends[keep]


def _search(scene: SceneSpec, cfg: SearchConfig, restart: int):
    rng = np.random.default_rng([cfg.seed, restart])
    boundary_angles = measure_of_boundary(scene.domain).angles % math.pi
    ends = np.array(scene.segments.endpoints)
    length = _total_length(ends)
    trace = [(0, length)]
    accepted = [ends]
    for it in range(1, cfg.max_iters + 1):
        _, cand = _propose(ends, rng, cfg.step(it), cfg, boundary_angles)
        cand = _clean(cand)
        if len(cand):
            cand_len = _total_length(cand)
            if cand_len < length:
                cert = verify(scene.domain, SegmentSet.from_array(cand), cfg.n_sweep, cfg.max_refinements)
                if cert.certified:
                    ends, length = cand, cand_len
                    accepted.append(ends)
        trace.append((it, length))
    return accepted, trace


def shorten(scene: SceneSpec, config: SearchConfig | None = None) -> tuple[SceneSpec, list[tuple[int, float]]]:
    """Shorten ``scene.segments`` by accept-if-shorter-and-certified moves.

    Moves perturb one endpoint (dragging any coincident endpoints along),
    shrink one segment toward its midpoint, or delete one segment. Each
    restart draws from its own seeded stream; the shortest result wins with
    ties going to the lowest restart index. The returned scene is
    re-certified at ``final_sweep``; if that fails, earlier accepted states
    are tried in reverse order.
    """
    cfg = config or SearchConfig()
    start = verify(scene.domain, scene.segments, cfg.final_sweep, cfg.max_refinements)
    if not start.certified:
        raise PreconditionError(f"input scene is {start.verdict}, not certified opaque")
    best = None
    for r in range(cfg.n_restarts):
        accepted, trace = _search(scene, cfg, r)
        for ends in reversed(accepted):
            segs = SegmentSet.from_array(ends)
            if ends is accepted[0] or verify(scene.domain, segs, cfg.final_sweep, cfg.max_refinements).certified:
                break
        length = segs.total_length
        if best is None or length < best[0]:
            best = (length, segs, trace)
    _, segs, trace = best
    if cfg.max_iters == 0:
        return scene, trace
    return SceneSpec(f"{scene.name}-shortened", scene.domain, segs), trace
