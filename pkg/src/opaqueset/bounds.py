"""Length bounds for opaque sets as executable checks, plus the audit report.

Every check compares a computed left-hand side with a closed-form right-hand
side at an explicit tolerance; truncation tails are added to the left-hand
side so that a ``satisfied`` flag is a statement about the untruncated value.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainMismatchError, InconsistentSceneError, ParameterError
from .geometry import ConvexPolygon, Interval, SegmentSet
from .measures import (
    DEFAULT_ELL_MAX, AngularMeasure, h_minus2_distance, mass_on_arcs, measure_of_boundary,
    measure_of_segments,
)
from .opacity import DEFAULT_MAX_REFINEMENTS, DEFAULT_N_SWEEP, OpacityCertificate, verify
from .shadows import (
    DEFAULT_N_GRID, l2_gap_parseval, l2_gap_quadrature, lipschitz_estimate, max_gap,
    quadrature_error_bounds, sample_profile,
)

SATISFIED = "satisfied"
VIOLATED = "violated"
NOT_APPLICABLE = "not_applicable"

DEFAULT_BETAS = tuple(k * math.pi / 24 for k in range(1, 7))


def lemma1_residual(length: float, perimeter: float, integral_gap: float) -> float:
    """``L - |dOmega|/2 - int(g - f)/4``; zero up to quadrature error."""
    return length - perimeter / 2.0 - integral_gap / 4.0


def _jones_gap(length: float, perimeter: float, tol: float) -> float:
    gap = length - perimeter / 2.0
    if gap < -tol:
        raise InconsistentSceneError(
            f"length {length!r} is below half the perimeter {perimeter / 2.0!r}")
    return max(gap, 0.0)


class Lemma4Result(NamedTuple):
    rhs: float
    satisfied: bool
    conservative_rhs: float
    conservative_satisfied: bool


def lemma4_check(length: float, perimeter: float, l2_gap: float, tol: float = 1e-6) -> Lemma4Result:
    """``int (g-f)^2 <= 8 sqrt(L) (L - |dOmega|/2)^{3/2}``.

    The conservative variant carries an extra factor ``sqrt(2)``: it follows
    from bounding ``int (g - f)`` below by a single triangle of height ``M``
    instead of one per half period.
    """
    gap = _jones_gap(length, perimeter, 1e-9)
    rhs = 8.0 * math.sqrt(length) * gap**1.5
    cons = math.sqrt(2.0) * rhs
    return Lemma4Result(rhs, l2_gap <= rhs + tol, cons, l2_gap <= cons + tol)


class TheoremResult(NamedTuple):
    lhs: float
    tail: float
    lhs_upper: float
    rhs: float
    satisfied: bool


def theorem_certificate(mu_o: AngularMeasure, mu_boundary: AngularMeasure, length: float,
                        perimeter: float, ell_max: int = DEFAULT_ELL_MAX,
                        tol: float = 1e-9) -> TheoremResult:
    """``||mu_O - mu_dOmega||_{H^-2} <= L^{1/4}/sqrt(2) (L - |dOmega|/2)^{3/4}``."""
    gap = _jones_gap(length, perimeter, 1e-9)
    dist = h_minus2_distance(mu_o, mu_boundary, ell_max)
    rhs = length**0.25 / math.sqrt(2.0) * gap**0.75
    return TheoremResult(dist.value, dist.tail_bound, dist.upper, rhs, dist.upper <= rhs + tol)


def j_beta(beta: float) -> list[Interval]:
    """Directions at angular distance at least ``beta`` from both axes (closed arcs)."""
    h = math.pi / 2
    return [Interval(k * h + beta, (k + 1) * h - beta) for k in range(4)]


def is_unit_square(poly: ConvexPolygon, tol: float = 1e-9) -> bool:
    v = poly.vertices
    if len(v) != 4:
        return False
    corners = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    return all(np.min(np.hypot(*(v - c).T)) <= tol for c in corners)


class PropositionRow(NamedTuple):
    beta: float
    lhs: float
    rhs: float
    satisfied: bool


def proposition_square(mu_o: AngularMeasure, length: float, betas: Sequence[float] = DEFAULT_BETAS,
                       domain: ConvexPolygon | None = None, tol: float = 1e-9) -> list[PropositionRow]:
    """Unit-square angular mass bound ``mu_O(J_beta) <= (L - 2)/(1 - cos beta)``.

    The length excess ``L - 2`` is the smallest admissible ``eta`` in the
    either-long-or-aligned alternative.
    """
    if domain is not None and not is_unit_square(domain):
        raise DomainMismatchError("the angular mass bound is specific to the unit square")
    if length < 2.0 - tol:
        raise InconsistentSceneError(f"length {length!r} < 2 cannot be opaque for the unit square")
    eta = max(length - 2.0, 0.0)
    rows = []
    for beta in betas:
        if not 0.0 < beta <= math.pi / 4 + 1e-15:
            raise ParameterError(f"beta must lie in (0, pi/4], got {beta}")
        lhs = mass_on_arcs(mu_o, j_beta(beta))
        rhs = eta / (1.0 - math.cos(beta))
        rows.append(PropositionRow(beta, lhs, rhs, lhs <= rhs + tol))
    return rows


# ------------------------------------------------------------ Crofton energy

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _pair_integrand(a1, d1, n1, a2, d2, n2, s, t):
    x = a1 + s[..., None] * d1
    y = a2 + t[..., None] * d2
    r = y - x
    dist = np.hypot(r[..., 0], r[..., 1])
    num = np.abs((r @ n1) * (r @ n2))
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(dist < 1e-12, 0.0, num / dist**3)
    return val


def _gauss_cells(f, cells: np.ndarray) -> np.ndarray:
    """Tensor Gauss-Legendre rule on each ``(s0, s1, t0, t1)`` row of ``cells``."""
    out = np.empty(len(cells))
    step = 1024
    for start in range(0, len(cells), step):
        c = cells[start:start + step]
        hs, ht = 0.5 * (c[:, 1] - c[:, 0]), 0.5 * (c[:, 3] - c[:, 2])
        s = c[:, :1] + hs[:, None] * (_GL_NODES + 1.0)
        t = c[:, 2:3] + ht[:, None] * (_GL_NODES + 1.0)
        vals = f(s[:, :, None], t[:, None, :])
        out[start:start + step] = hs * ht * np.einsum("i,kij,j->k", _GL_WEIGHTS, vals, _GL_WEIGHTS)
    return out


def _split(cells: np.ndarray) -> np.ndarray:
    s0, s1, t0, t1 = cells.T
    sm, tm = 0.5 * (s0 + s1), 0.5 * (t0 + t1)
    quads = [(s0, sm, t0, tm), (sm, s1, t0, tm), (s0, sm, tm, t1), (sm, s1, tm, t1)]
    return np.stack([np.stack(q, axis=1) for q in quads], axis=1).reshape(-1, 4)


def _adaptive_cells(f, cells, atol_rel: float, atol_floor: float, max_depth: int) -> float:
    """Integrate ``f`` over a union of parameter rectangles by breadth-first
    quadrisection.

    A cell is accepted once splitting it changes its estimate by at most the
    tolerance; all cells of one level are evaluated in a single batch.
    """
    cells = np.asarray(cells, dtype=float)
    wholes = _gauss_cells(f, cells)
    atol = max(atol_rel * abs(wholes.sum()), atol_floor)
    result = 0.0
    for depth in range(max_depth):
        children = _split(cells)
        parts = _gauss_cells(f, children).reshape(-1, 4)
        totals = parts.sum(axis=1)
        done = np.abs(totals - wholes) <= atol
        if depth == max_depth - 1:
            done[:] = True
        result += float(totals[done].sum())
        if done.all():
            break
        cells = children.reshape(-1, 4, 4)[~done].reshape(-1, 4)
        wholes = parts[~done].ravel()
    return result


def _initial_cells(p: np.ndarray, q: np.ndarray) -> list:
    """Unit parameter square, cut at the crossing point when the segments
    cross so that the ``1/r`` singularity sits on cell corners."""
    d1, d2 = p[1] - p[0], q[1] - q[0]
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den != 0.0:
        w = q[0] - p[0]
        s = (w[0] * d2[1] - w[1] * d2[0]) / den
        t = (w[0] * d1[1] - w[1] * d1[0]) / den
        if 1e-9 < s < 1 - 1e-9 and 1e-9 < t < 1 - 1e-9:
            return [[0.0, s, 0.0, t], [s, 1.0, 0.0, t], [0.0, s, t, 1.0], [s, 1.0, t, 1.0]]
        if 1e-9 < s < 1 - 1e-9 and (abs(t) <= 1e-9 or abs(t - 1) <= 1e-9):
            return [[0.0, s, 0.0, 1.0], [s, 1.0, 0.0, 1.0]]
        if 1e-9 < t < 1 - 1e-9 and (abs(s) <= 1e-9 or abs(s - 1) <= 1e-9):
            return [[0.0, 1.0, 0.0, t], [0.0, 1.0, t, 1.0]]
    return [[0.0, 1.0, 0.0, 1.0]]


def crofton_energy(segs: SegmentSet, rtol: float = 1e-6, max_depth: int = 30) -> float:
    """``E(O) = int int |<n(x), y-x> <y-x, n(y)>| / |x-y|^3 dH1(x) dH1(y)``.

    Pairs on one straight segment contribute zero (the chord is orthogonal to
    the normal). Distinct pairs use 32x32 Gauss-Legendre rules with adaptive
    bisection of the parameter square.
    """
    n = len(segs)
    if n < 2:
        return 0.0
    ends = segs.endpoints
    lengths = segs.lengths
    dirs = ends[:, 1] - ends[:, 0]
    normals = np.column_stack([-dirs[:, 1], dirs[:, 0]]) / lengths[:, None]
    scale = float(lengths.sum())
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off = ends[j] - ends[i, 0]
            if np.all(np.abs(off @ normals[i]) <= 1e-14 * scale):
                continue  # collinear: both inner products vanish identically

            def f(s, t, i=i, j=j):
                return _pair_integrand(ends[i, 0], dirs[i], normals[i], ends[j, 0], dirs[j], normals[j], s, t)

            val = _adaptive_cells(f, _initial_cells(ends[i], ends[j]), rtol,
                                  1e-15 * scale / (lengths[i] * lengths[j]), max_depth)
            # The integrand is symmetric in (x, y): count both orders.
            total += 2.0 * val * lengths[i] * lengths[j]
    return total


# ------------------------------------------------------------------- audit

@dataclass(frozen=True)
class AuditConfig:
    n_grid: int = DEFAULT_N_GRID
    n_sweep: int = DEFAULT_N_SWEEP
    max_refinements: int = DEFAULT_MAX_REFINEMENTS
    ell_max: int = DEFAULT_ELL_MAX
    betas: tuple = DEFAULT_BETAS
    tol: float = 1e-9
    lemma_tol: float = 1e-6
    crofton_max_segments: int = 64


@dataclass
class AuditReport:
    config: AuditConfig
    length: float
    perimeter: float
    jones_bound: float
    jones_gap: float
    opacity: OpacityCertificate
    integral_gap: float
    lemma1_residual: float
    l2_gap_quadrature: float
    l2_gap_parseval: float
    l2_gap_tail: float
    max_gap: float
    max_gap_theta: float
    max_gap_bound: float
    lipschitz_f: float
    lipschitz_g: float
    h_minus2: float
    h_minus2_tail: float
    lemma4_rhs: float = math.nan
    lemma4_conservative_rhs: float = math.nan
    theorem_lhs: float = math.nan
    theorem_rhs: float = math.nan
    crofton_energy: float = math.nan
    lemma1_tolerance: float = math.nan
    parseval_tolerance: float = math.nan
    proposition: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def all_satisfied(self) -> bool:
        return VIOLATED not in self.checks.values()

    @property
    def violations(self) -> list[str]:
        return [k for k, v in self.checks.items() if v == VIOLATED]

    def to_dict(self) -> dict:
        """Flat key-value view (dotted keys, scalar values)."""
        out: dict = {}
        for k, v in asdict(self.config).items():
            out[f"config.{k}"] = ",".join(repr(b) for b in v) if isinstance(v, tuple) else v
        for name in ("length", "perimeter", "jones_bound", "jones_gap", "integral_gap",
                     "lemma1_residual", "l2_gap_quadrature", "l2_gap_parseval", "l2_gap_tail",
                     "max_gap", "max_gap_theta", "max_gap_bound", "lipschitz_f", "lipschitz_g",
                     "h_minus2", "h_minus2_tail", "lemma4_rhs", "lemma4_conservative_rhs",
                     "theorem_lhs", "theorem_rhs", "crofton_energy", "lemma1_tolerance",
                     "parseval_tolerance"):
            out[name] = getattr(self, name)
        cert = self.opacity
        out["opacity.verdict"] = cert.verdict
        out["opacity.method"] = cert.method
        out["opacity.witness_theta"] = cert.witness[0] if cert.witness else math.nan
        out["opacity.witness_offset"] = cert.witness[1] if cert.witness else math.nan
        out["opacity.n_sweep"] = cert.n_sweep
        out["opacity.refinements"] = cert.refinements
        out["opacity.slack"] = cert.slack
        out["opacity.min_margin"] = cert.min_margin
        out["opacity.components"] = cert.n_components
        for k, row in enumerate(self.proposition):
            out[f"proposition.{k}.beta"] = row.beta
            out[f"proposition.{k}.lhs"] = row.lhs
            out[f"proposition.{k}.rhs"] = row.rhs
        for k, v in self.checks.items():
            out[f"check.{k}"] = v
        out["all_satisfied"] = self.all_satisfied
        return out


def _status(ok: bool) -> str:
    return SATISFIED if ok else VIOLATED


def audit(poly: ConvexPolygon, segs: SegmentSet, config: AuditConfig | None = None) -> AuditReport:
    """Run the opacity checker and every bound on one scene.

    Bounds that assume opacity are marked not applicable unless the scene is
    certified; the length identity and Lipschitz estimates hold for any scene.
    """
    cfg = config or AuditConfig()
    cert = verify(poly, segs, cfg.n_sweep, cfg.max_refinements)
    mu_o = measure_of_segments(segs)
    mu_b = measure_of_boundary(poly)
    length, perim = mu_o.total_mass, poly.perimeter
    profile = sample_profile(poly, mu_o, cfg.n_grid)
    integral_gap = profile.integrate(profile.gap_values)
    quad = l2_gap_quadrature(profile)
    pars = l2_gap_parseval(mu_o, mu_b, cfg.ell_max)
    peak = max_gap(profile)
    lip = lipschitz_estimate(profile)
    dist = h_minus2_distance(mu_o, mu_b, cfg.ell_max)
    residual = lemma1_residual(length, perim, integral_gap)

    report = AuditReport(
        config=cfg, length=length, perimeter=perim, jones_bound=perim / 2.0,
        jones_gap=length - perim / 2.0, opacity=cert, integral_gap=integral_gap,
        lemma1_residual=residual, l2_gap_quadrature=quad.value, l2_gap_parseval=pars.value,
        l2_gap_tail=pars.tail_bound, max_gap=peak.refined_value, max_gap_theta=peak.refined_theta,
        max_gap_bound=math.nan, lipschitz_f=lip.f, lipschitz_g=lip.g, h_minus2=dist.value,
        h_minus2_tail=dist.tail_bound,
    )
    checks = report.checks
    # Identities hold exactly; tolerances cover quadrature and truncation error.
    qerr = quadrature_error_bounds(profile)
    report.lemma1_tolerance = max(cfg.lemma_tol * (1.0 + length), qerr.gap / 4.0)
    checks["lemma1_identity"] = _status(abs(residual) <= report.lemma1_tolerance)
    report.parseval_tolerance = 1e-4 * pars.value + pars.tail_bound + qerr.squared_gap
    checks["parseval_routes_agree"] = _status(abs(quad.value - pars.value) <= report.parseval_tolerance)
    checks["lipschitz_g"] = _status(lip.g <= length + cfg.tol)
    checks["lipschitz_f"] = _status(lip.f <= perim / 2.0 + cfg.tol)

    opaque = cert.certified
    checks["jones"] = _status(report.jones_gap >= -cfg.tol) if opaque else NOT_APPLICABLE
    if opaque and report.jones_gap >= -cfg.tol:
        l2_upper = pars.value + pars.tail_bound
        l4 = lemma4_check(length, perim, l2_upper, cfg.lemma_tol)
        report.lemma4_rhs, report.lemma4_conservative_rhs = l4.rhs, l4.conservative_rhs
        checks["lemma4"] = _status(l4.satisfied)
        report.max_gap_bound = math.sqrt(max(4 * length**2 - 2 * length * perim, 0.0))
        slack = 2.0 * length * math.pi / cfg.n_grid
        checks["max_gap"] = _status(peak.value <= report.max_gap_bound + slack + cfg.tol)
        thm = theorem_certificate(mu_o, mu_b, length, perim, cfg.ell_max, cfg.tol)
        report.theorem_lhs, report.theorem_rhs = thm.lhs_upper, thm.rhs
        checks["theorem"] = _status(thm.satisfied)
        if is_unit_square(poly):
            report.proposition = proposition_square(mu_o, length, cfg.betas, poly, cfg.tol)
            checks["proposition"] = _status(all(r.satisfied for r in report.proposition))
        else:
            checks["proposition"] = NOT_APPLICABLE
    else:
        for k in ("lemma4", "max_gap", "theorem", "proposition"):
            checks[k] = NOT_APPLICABLE

    if len(segs) <= cfg.crofton_max_segments:
        report.crofton_energy = crofton_energy(segs)
    return report
