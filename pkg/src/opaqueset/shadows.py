"""Shadow functions of a domain and of a segment set, and their L2 gap.

``f(theta)`` is the width of the domain in direction ``theta``; ``g(theta)``
is the overlap-counting shadow length of the segments,
``g(theta) = sum_j m_j |cos(theta - a_j)|`` over the atoms of the segment
measure. Both are convolutions of ``|cos|`` with an angular measure, which
gives an exact Fourier route for ``int (g - f)^2`` next to plain quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ParameterError
from .geometry import TWO_PI, ConvexPolygon, width
from .measures import DEFAULT_ELL_MAX, AngularMeasure, difference_variation, fourier, measure_of_boundary

DEFAULT_N_GRID = 8192

_BLOCK_ELEMENTS = 2_000_000


def abs_cos_coefficient(ell):
    """``a_l = int_0^{2 pi} |cos t| exp(-i l t) dt`` in closed form (real)."""
    ells = np.abs(np.atleast_1d(np.asarray(ell, dtype=np.int64)))
    out = np.zeros(ells.shape)
    out[ells == 0] = 4.0
    even = (ells % 2 == 0) & (ells != 0)
    sign = np.where(ells % 4 == 0, -1.0, 1.0)
    out[even] = sign[even] * 4.0 / (ells[even].astype(float) ** 2 - 1.0)
    if np.ndim(ell) == 0:
        return float(out[0])
    return out


def shadow_g(mu: AngularMeasure, theta):
    """``sum_j m_j |cos(theta - a_j)|``; scalar or vectorized in ``theta``."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros(th.shape)
    if len(mu):
        step = max(1, _BLOCK_ELEMENTS // len(mu))
        for start in range(0, len(th), step):
            t = th[start:start + step]
            out[start:start + step] = np.abs(np.cos(np.subtract.outer(t, mu.angles))) @ mu.masses
    if np.ndim(theta) == 0:
        return float(out[0])
    return out


def shadow_f(poly: ConvexPolygon, theta, route: str = "geometric"):
    """Domain width by vertex projection (``geometric``) or as the convolution
    of ``|cos|`` with the boundary measure (``convolution``)."""
    if route == "geometric":
        return width(poly, theta)
    if route == "convolution":
        return shadow_g(measure_of_boundary(poly), theta)
    raise ParameterError(f"unknown route {route!r}")


@dataclass(frozen=True, eq=False)
class ShadowProfile:
    """``f``, ``g`` and ``g - f`` sampled at ``theta_k = 2 pi k / n_grid``.

    Integrals use the periodic trapezoid rule.
    """

    poly: ConvexPolygon
    mu_o: AngularMeasure
    n_grid: int
    thetas: np.ndarray
    f_values: np.ndarray
    g_values: np.ndarray
    rule: str = "periodic-trapezoid"

    @property
    def gap_values(self) -> np.ndarray:
        return self.g_values - self.f_values

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n_grid

    def integrate(self, values) -> float:
        return float(np.sum(values) * self.spacing)

    @property
    def length(self) -> float:
        return self.mu_o.total_mass

    @property
    def perimeter(self) -> float:
        return self.poly.perimeter

    def gap_at(self, theta: float) -> float:
        return shadow_g(self.mu_o, theta) - float(width(self.poly, theta))


def sample_profile(poly: ConvexPolygon, mu_o: AngularMeasure, n_grid: int = DEFAULT_N_GRID) -> ShadowProfile:
    if int(n_grid) != n_grid or n_grid < 16 or n_grid % 2:
        raise ParameterError(f"n_grid must be an even integer >= 16, got {n_grid}")
    n_grid = int(n_grid)
    thetas = TWO_PI * np.arange(n_grid) / n_grid
    f = np.asarray(width(poly, thetas))
    g = shadow_g(mu_o, thetas)
    for arr in (thetas, f, g):
        arr.setflags(write=False)
    return ShadowProfile(poly, mu_o, n_grid, thetas, f, g)


class QuadratureBounds(NamedTuple):
    gap: float
    squared_gap: float


def quadrature_error_bounds(profile: ShadowProfile) -> QuadratureBounds:
    """A priori trapezoid-rule error bounds for ``int (g - f)`` and ``int (g - f)^2``.

    Between kinks ``g'' = -g`` and ``f'' = -f``. Each atom of mass ``m`` puts
    two slope jumps of ``2 m`` into its shadow, so the jumps of ``g - f`` sum to
    at most ``J = 4 L + 2 |dOmega|``. A kink of jump ``j`` costs at most
    ``j h^2 / 8`` and a smooth stretch at most ``h^2 / 12`` times the
    integral of the second derivative. ``|g - f| <= M = max(L, |dOmega|/2)``
    and its slope is at most ``K = L + |dOmega|/2``.
    """
    h = profile.spacing
    length, half_p = profile.length, profile.perimeter / 2.0
    jumps = 4.0 * length + 4.0 * half_p
    m = max(length, half_p)
    k = length + half_p
    linear = h * h * (jumps / 8.0 + (4.0 * length + 4.0 * half_p) / 12.0)
    squared = h * h * (2.0 * m * jumps / 8.0 + TWO_PI * (2.0 * k * k + 2.0 * m * m) / 12.0)
    return QuadratureBounds(linear, squared)


class L2Gap(NamedTuple):
    value: float
    tail_bound: float = 0.0
    route: str = "quadrature"


def l2_gap_quadrature(profile: ShadowProfile) -> L2Gap:
    return L2Gap(profile.integrate(profile.gap_values**2), 0.0, "quadrature")


def l2_gap_parseval(mu_o: AngularMeasure, mu_boundary: AngularMeasure,
                    ell_max: int = DEFAULT_ELL_MAX) -> L2Gap:
    """``int (g - f)^2`` from Fourier coefficients, truncated at ``ell_max``.

    The omitted part is bounded using ``a_l^2 = 16/(l^2-1)^2 <= 16 c_N / l^4``
    for ``|l| > N`` with ``c_N = (1 - 1/(N+1)^2)^-2`` and the total variation
    of ``mu_o - mu_boundary`` as a bound on every coefficient of the difference.
    """
    if int(ell_max) != ell_max or ell_max < 2:
        raise ParameterError(f"ell_max must be an integer >= 2, got {ell_max}")
    n = int(ell_max)
    length, half_perimeter = mu_o.total_mass, mu_boundary.total_mass
    # mass(mu_boundary) is |dOmega|/2, so 4L - 2|dOmega| = 4L - 4*mass.
    mean_term = (4.0 * length - 4.0 * half_perimeter) ** 2 / TWO_PI
    ells = np.arange(2, n + 1, 2)
    a = abs_cos_coefficient(ells)
    diff = fourier(mu_o, ells) - fourier(mu_boundary, ells)
    series = 2.0 * np.sum(a**2 * np.abs(diff) ** 2) / TWO_PI
    c_n = (1.0 - 1.0 / (n + 1) ** 2) ** -2
    tail = 16.0 * c_n * difference_variation(mu_o, mu_boundary) ** 2 / TWO_PI * 2.0 / (3.0 * n**3)
    return L2Gap(mean_term + series, tail, "parseval")


def l2_gap(profile: ShadowProfile | None = None, *, mu_o: AngularMeasure | None = None,
           mu_boundary: AngularMeasure | None = None, route: str = "parseval",
           ell_max: int = DEFAULT_ELL_MAX) -> L2Gap:
    if route == "quadrature":
        if profile is None:
            raise ParameterError("quadrature route needs a sampled profile")
        return l2_gap_quadrature(profile)
    if route == "parseval":
        if mu_o is None and profile is not None:
            mu_o = profile.mu_o
        if mu_boundary is None and profile is not None:
            mu_boundary = measure_of_boundary(profile.poly)
        if mu_o is None or mu_boundary is None:
            raise ParameterError("parseval route needs both measures")
        return l2_gap_parseval(mu_o, mu_boundary, ell_max)
    raise ParameterError(f"unknown route {route!r}")


class GapMaximum(NamedTuple):
    value: float
    theta: float
    refined_value: float
    refined_theta: float
    upper_bound: float


def max_gap(profile: ShadowProfile, refine: bool = True) -> GapMaximum:
    """Grid maximum of ``g - f``, a bounded refinement around it, and the
    Lipschitz upper bound ``M + 2 L pi / n_grid`` for the true maximum."""
    gap = profile.gap_values
    k = int(np.argmax(gap))
    m, theta = float(gap[k]), float(profile.thetas[k])
    lip = 2.0 * max(profile.length, profile.perimeter / 2.0)
    upper = m + lip * math.pi / profile.n_grid
    r_val, r_theta = m, theta
    if refine:
        h = profile.spacing
        res = minimize_scalar(lambda t: -profile.gap_at(t), bounds=(theta - h, theta + h),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > m:
            r_val, r_theta = float(-res.fun), float(res.x % TWO_PI)
    return GapMaximum(m, theta, r_val, r_theta, upper)


class LipschitzEstimate(NamedTuple):
    f: float
    g: float


def lipschitz_estimate(profile: ShadowProfile) -> LipschitzEstimate:
    h = profile.spacing

    def slope(v):
        return float(np.max(np.abs(np.diff(np.append(v, v[0])))) / h)

    return LipschitzEstimate(slope(profile.f_values), slope(profile.g_values))
