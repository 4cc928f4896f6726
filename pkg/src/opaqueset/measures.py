"""Atomic angular measures on the circle and their negative Sobolev distance.

A segment of length ``l`` and direction ``a`` contributes the two atoms
``(a, l/2)`` and ``(a + pi, l/2)``; the boundary measure of a polygon is the
same construction applied to its edges with every mass halved.

Fourier coefficients are unnormalized atomic sums
``hat(l) = sum_j m_j exp(-i l a_j)``. Sobolev norms divide by ``sqrt(2 pi)``
so that they are taken against the orthonormal basis ``exp(i l t)/sqrt(2 pi)``.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, ValidationError
from .geometry import ANGLE_TOL, TWO_PI, ConvexPolygon, Interval, SegmentSet, canonical_angles

DEFAULT_ELL_MAX = 256


class AngularMeasure:
    """Finite positive atomic measure on ``[0, 2 pi)``.

    Atoms closer than ``merge_tol`` (with wraparound) are merged.
    """

    def __init__(self, angles=(), masses=(), merge_tol: float = ANGLE_TOL):
        a = np.atleast_1d(np.asarray(angles, dtype=float))
        m = np.atleast_1d(np.asarray(masses, dtype=float))
        if a.shape != m.shape:
            raise ValidationError("angles and masses differ in length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(m))):
            raise ValidationError("non-finite atom")
        if np.any(m <= 0):
            raise ValidationError("atom masses must be strictly positive")
        a, m = _merge_atoms(canonical_angles(a), m, merge_tol)
        a.setflags(write=False)
        m.setflags(write=False)
        self._angles = a
        self._masses = m

    @property
    def angles(self) -> np.ndarray:
        return self._angles

    @property
    def masses(self) -> np.ndarray:
        return self._masses

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self._angles.tolist(), self._masses.tolist()))

    @property
    def total_mass(self) -> float:
        return float(self._masses.sum())

    def __len__(self) -> int:
        return len(self._angles)

    def __repr__(self) -> str:
        return f"AngularMeasure(atoms={len(self)}, mass={self.total_mass:.6g})"

    def scaled(self, factor: float) -> "AngularMeasure":
        return AngularMeasure(self._angles, self._masses * factor)

    def fourier(self, ell):
        return fourier(self, ell)

    def integrate(self, func) -> float:
        """``int func d(mu)`` for a vectorized callable."""
        if len(self) == 0:
            return 0.0
        return float(np.dot(self._masses, func(self._angles)))


def _merge_atoms(a: np.ndarray, m: np.ndarray, tol: float):
    if len(a) == 0:
        return np.zeros(0), np.zeros(0)
    order = np.argsort(a, kind="stable")
    a, m = a[order], m[order]
    out_a, out_m = [a[0]], [m[0]]
    for ai, mi in zip(a[1:], m[1:]):
        if ai - out_a[-1] <= tol:
            out_m[-1] += mi
        else:
            out_a.append(ai)
            out_m.append(mi)
    if len(out_a) > 1 and out_a[0] + TWO_PI - out_a[-1] <= tol:
        out_m[0] += out_m.pop()
        out_a.pop()
    return np.array(out_a), np.array(out_m)


def measure_of_segments(segs: SegmentSet) -> AngularMeasure:
    if len(segs) == 0:
        return AngularMeasure()
    alpha = segs.angles
    half = 0.5 * segs.lengths
    return AngularMeasure(np.concatenate([alpha, alpha + math.pi]), np.concatenate([half, half]))


def measure_of_boundary(poly: ConvexPolygon) -> AngularMeasure:
    return measure_of_segments(poly.boundary_segments()).scaled(0.5)


def fourier(mu: AngularMeasure, ell):
    """Unnormalized coefficient(s) ``sum_j m_j exp(-i ell a_j)``."""
    ells = np.atleast_1d(np.asarray(ell))
    if len(mu) == 0:
        out = np.zeros(ells.shape, dtype=complex)
    else:
        phase = np.outer(ells.astype(float), mu.angles)
        out = np.exp(-1j * phase) @ mu.masses
    if np.ndim(ell) == 0:
        return complex(out[0])
    return out


def difference_variation(mu1: AngularMeasure, mu2: AngularMeasure, tol: float = ANGLE_TOL) -> float:
    """Total variation of ``mu1 - mu2``; bounds every Fourier coefficient of the difference."""
    if len(mu1) == 0 and len(mu2) == 0:
        return 0.0
    a = np.concatenate([mu1.angles, mu2.angles])
    m = np.concatenate([mu1.masses, -mu2.masses])
    order = np.argsort(a, kind="stable")
    a, m = a[order], m[order]
    # Group atoms closer than tol (with wraparound) and sum signed masses.
    new = np.concatenate([[True], np.diff(a) > tol])
    groups = np.cumsum(new) - 1
    net = np.bincount(groups, weights=m)
    if len(net) > 1 and a[0] + TWO_PI - a[-1] <= tol:
        net[0] += net[-1]
        net = net[:-1]
    return float(np.abs(net).sum())


class SobolevDistance(NamedTuple):
    value: float
    tail_bound: float

    @property
    def upper(self) -> float:
        """Upper bound for the untruncated norm."""
        return math.sqrt(self.value**2 + self.tail_bound)


def h_minus2_distance(mu1: AngularMeasure, mu2: AngularMeasure,
                      ell_max: int = DEFAULT_ELL_MAX) -> SobolevDistance:
    """Truncated homogeneous H^-2 distance with a certified remainder.

    ``value**2`` sums ``|nu_hat(l)|^2 / (2 pi l^4)`` over ``0 < |l| <= ell_max``;
    the remainder of the squared norm is at most ``tail_bound`` because
    ``|nu_hat|`` is at most the total variation of ``mu1 - mu2`` and
    ``sum_{|l|>N} l^-4 <= 2/(3 N^3)``.
    """
    if int(ell_max) != ell_max or ell_max < 2:
        raise ParameterError(f"ell_max must be an integer >= 2, got {ell_max}")
    ells = np.arange(1, int(ell_max) + 1)
    nu = fourier(mu1, ells) - fourier(mu2, ells)
    # Real measures: the coefficient at -l is the conjugate of the one at l.
    sq = 2.0 * np.sum(np.abs(nu) ** 2 / ells.astype(float) ** 4) / TWO_PI
    tail = difference_variation(mu1, mu2) ** 2 / TWO_PI * 2.0 / (3.0 * float(ell_max) ** 3)
    return SobolevDistance(math.sqrt(sq), tail)


def mass_on_arcs(mu: AngularMeasure, arcs: Sequence[Interval | tuple], tol: float = ANGLE_TOL) -> float:
    """Mass of the atoms lying in the union of closed arcs of ``[0, 2 pi]``."""
    if len(mu) == 0:
        return 0.0
    a = mu.angles
    hit = np.zeros(len(a), dtype=bool)
    for arc in arcs:
        lo, hi = (arc.lo, arc.hi) if isinstance(arc, Interval) else arc
        for shift in (0.0, TWO_PI):
            hit |= (a + shift >= lo - tol) & (a + shift <= hi + tol)
    return float(mu.masses[hit].sum())


class TrigPolynomial:
    """Real trigonometric polynomial ``mean + sum_k c_k cos(k t) + s_k sin(k t)``.

    ``cos_coeffs[k-1]`` and ``sin_coeffs[k-1]`` multiply frequency ``k``.
    """

    def __init__(self, cos_coeffs: Sequence[float] = (), sin_coeffs: Sequence[float] = (), mean: float = 0.0):
        n = max(len(cos_coeffs), len(sin_coeffs))
        self.cos_coeffs = np.zeros(n)
        self.sin_coeffs = np.zeros(n)
        self.cos_coeffs[:len(cos_coeffs)] = cos_coeffs
        self.sin_coeffs[:len(sin_coeffs)] = sin_coeffs
        self.mean = float(mean)

    @property
    def degree(self) -> int:
        return len(self.cos_coeffs)

    def __call__(self, theta):
        t = np.asarray(theta, dtype=float)
        k = np.arange(1, self.degree + 1)
        kt = np.multiply.outer(t, k)
        return self.mean + np.cos(kt) @ self.cos_coeffs + np.sin(kt) @ self.sin_coeffs

    def complex_coefficients(self) -> dict[int, complex]:
        """Coefficients ``c_l`` in ``phi = sum_l c_l exp(i l t)`` for ``l >= 1``."""
        return {k + 1: 0.5 * (c - 1j * s) for k, (c, s) in enumerate(zip(self.cos_coeffs, self.sin_coeffs))}

    def h2_norm(self) -> float:
        """Homogeneous H^2 seminorm in the orthonormal-basis convention."""
        total = 0.0
        for ell, c in self.complex_coefficients().items():
            total += 2.0 * TWO_PI * ell**4 * abs(c) ** 2
        return math.sqrt(total)


class Pairing(NamedTuple):
    pairing_gap: float
    h2_norm_phi: float


def pair_with_test_function(mu1: AngularMeasure, mu2: AngularMeasure, phi: TrigPolynomial) -> Pairing:
    if phi.mean != 0.0:
        raise ParameterError("test function must have zero mean")
    gap = abs(mu1.integrate(phi) - mu2.integrate(phi))
    return Pairing(gap, phi.h2_norm())
