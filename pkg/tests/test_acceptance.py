"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Lines are echoed in the terminal summary under "acceptance criteria".
"""
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from helpers import crofton_midpoint_oracle, random_lines_hit
from opaqueset.bounds import crofton_energy, lemma1_residual, lemma4_check, proposition_square, \
    theorem_certificate
from opaqueset.constructions import (
    disk_half_circle_whiskers, figure_scenes, random_scene, rectangle_three_sides, square_boundary,
    square_conjectured, square_two_sides, triangle_tripod,
)
from opaqueset.geometry import SegmentSet
from opaqueset.measures import fourier, h_minus2_distance, measure_of_boundary, measure_of_segments
from opaqueset.opacity import CERTIFIED, NON_OPAQUE, verify, witness_check
from opaqueset.optimizer import SearchConfig, shorten
from opaqueset.shadows import (
    abs_cos_coefficient, l2_gap_parseval, l2_gap_quadrature, sample_profile, shadow_f,
)

N_RANDOM = 100


def opaque_scenes():
    """Figure constructions plus random scenes made opaque by their boundary."""
    return figure_scenes() + [random_scene(s, include_boundary=True) for s in range(N_RANDOM)]


def all_scenes():
    extra = [square_boundary(), square_two_sides()] + [random_scene(s) for s in range(N_RANDOM)]
    return opaque_scenes() + extra


def certified_scenes():
    out = []
    for sc in opaque_scenes() + [square_boundary()]:
        if verify(sc.domain, sc.segments).certified:
            out.append(sc)
    return out


@pytest.fixture(scope="module")
def certified():
    return certified_scenes()


def test_criterion_01_jones_bound(criterion):
    t0 = time.perf_counter()
    scenes = opaque_scenes()
    worst = math.inf
    n_cert = 0
    for sc in scenes:
        if verify(sc.domain, sc.segments).certified:
            n_cert += 1
            worst = min(worst, sc.length - sc.domain.perimeter / 2)
    elapsed = time.perf_counter() - t0
    ok = n_cert == len(scenes) and worst >= -1e-9 and elapsed < 10
    criterion(1, "Jones bound on certified scenes", ok,
              f"{n_cert}/{len(scenes)} certified, min L-|dOmega|/2 = {worst:.3g}, {elapsed:.1f}s")
    assert ok


def test_criterion_02_cauchy_identity(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(N_RANDOM):
        sc = random_scene(seed)
        prof = sample_profile(sc.domain, measure_of_segments(sc.segments), 8192)
        rel_f = abs(prof.integrate(prof.f_values) - 2 * sc.domain.perimeter) / (2 * sc.domain.perimeter)
        rel_g = abs(prof.integrate(prof.g_values) - 4 * sc.length) / (4 * sc.length)
        worst = max(worst, rel_f, rel_g)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10
    criterion(2, "Cauchy identities int f = 2|dOmega|, int g = 4L", ok,
              f"max rel err {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_03_width_routes(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for k in range(1000):
        poly = random_scene(k).domain
        theta = float(rng.uniform(0, 2 * math.pi))
        worst = max(worst, abs(float(shadow_f(poly, theta)) - shadow_f(poly, theta, "convolution")))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5
    criterion(3, "geometric vs convolution width", ok, f"max diff {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_04_abs_cos_table(criterion):
    pts = [0.0, math.pi / 2, 3 * math.pi / 2, 2 * math.pi]
    worst = 0.0
    for ell in range(-64, 65):
        re = sum(quad(lambda t: abs(math.cos(t)) * math.cos(ell * t), a, b, limit=400, epsabs=1e-13)[0]
                 for a, b in zip(pts, pts[1:]))
        im = sum(quad(lambda t: -abs(math.cos(t)) * math.sin(ell * t), a, b, limit=400, epsabs=1e-13)[0]
                 for a, b in zip(pts, pts[1:]))
        worst = max(worst, abs(abs_cos_coefficient(ell) - re), abs(im))
    exact = (abs_cos_coefficient(2) == 4 / 3 and abs_cos_coefficient(3) == 0.0
             and abs_cos_coefficient(4) == -4 / 15)
    ok = worst <= 1e-8 and exact
    criterion(4, "|cos| Fourier coefficients", ok, f"max diff {worst:.2e}, exact values {exact}")
    assert ok


def test_criterion_05_odd_frequencies(criterion):
    odd = np.arange(1, 64, 2)
    worst = 0.0
    measures = []
    for sc in all_scenes():
        measures += [measure_of_segments(sc.segments), measure_of_boundary(sc.domain)]
    for mu in measures:
        worst = max(worst, float(np.abs(fourier(mu, odd)).max()))
    ok = worst <= 1e-12
    criterion(5, "odd Fourier coefficients vanish", ok, f"{len(measures)} measures, max {worst:.2e}")
    assert ok


def test_criterion_06_lemma1_identity(criterion):
    worst = 0.0
    for sc in all_scenes():
        prof = sample_profile(sc.domain, measure_of_segments(sc.segments), 8192)
        res = lemma1_residual(sc.length, sc.domain.perimeter, prof.integrate(prof.gap_values))
        worst = max(worst, abs(res) / (1 + sc.length))
    ok = worst <= 1e-6
    criterion(6, "L - |dOmega|/2 - int(g-f)/4 = 0", ok, f"max residual/(1+L) {worst:.2e}")
    assert ok


def test_criterion_07_lemma4(criterion, certified):
    worst_slack = math.inf
    for sc in certified:
        mu_o, mu_b = measure_of_segments(sc.segments), measure_of_boundary(sc.domain)
        pars = l2_gap_parseval(mu_o, mu_b)
        quad_val = l2_gap_quadrature(sample_profile(sc.domain, mu_o)).value
        upper = max(pars.value + pars.tail_bound, quad_val)
        res = lemma4_check(sc.length, sc.domain.perimeter, upper)
        worst_slack = min(worst_slack, res.rhs + 1e-6 - upper)
    sq = square_boundary()
    mu_o = measure_of_segments(sq.segments)
    sq_quad = l2_gap_quadrature(sample_profile(sq.domain, mu_o)).value
    sq_pars = l2_gap_parseval(mu_o, measure_of_boundary(sq.domain)).value
    sq_err = max(abs(sq_quad - (2 * math.pi + 4)), abs(sq_pars - (2 * math.pi + 4)))
    ok = worst_slack >= 0 and sq_err <= 1e-5
    criterion(7, "int (g-f)^2 <= 8 sqrt(L) (L-|dOmega|/2)^{3/2}", ok,
              f"{len(certified)} scenes, min slack {worst_slack:.3g}, square 2pi+4 err {sq_err:.1e}")
    assert ok


def test_criterion_08_parseval_cross_check(criterion):
    t0 = time.perf_counter()
    worst = raw = -math.inf
    for seed in range(N_RANDOM):
        sc = random_scene(seed)
        mu_o, mu_b = measure_of_segments(sc.segments), measure_of_boundary(sc.domain)
        q = l2_gap_quadrature(sample_profile(sc.domain, mu_o, 8192)).value
        p = l2_gap_parseval(mu_o, mu_b, 256)
        worst = max(worst, (abs(q - p.value) - p.tail_bound) / p.value)
        raw = max(raw, abs(q - p.value) / p.value)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-4 and elapsed < 30
    criterion(8, "quadrature vs Parseval for int (g-f)^2", ok,
              f"max |diff|/value {raw:.2e} before tail, {worst:.2e} after, {elapsed:.1f}s")
    assert ok


def test_criterion_09_stability_theorem(criterion, certified):
    worst_slack = math.inf
    for sc in certified:
        res = theorem_certificate(measure_of_segments(sc.segments), measure_of_boundary(sc.domain),
                                  sc.length, sc.domain.perimeter)
        worst_slack = min(worst_slack, res.rhs - res.lhs_upper)
    sq = square_boundary()
    res = theorem_certificate(measure_of_segments(sq.segments), measure_of_boundary(sq.domain), 4.0, 4.0)
    sq_ok = (abs(res.lhs - math.sqrt(math.pi**3 / 5760)) <= 1e-6 + res.tail
             and abs(res.rhs - 2**0.75) <= 1e-12 and res.satisfied)
    ok = worst_slack >= -1e-9 and sq_ok
    criterion(9, "H^-2 distance <= L^{1/4}/sqrt2 (L-|dOmega|/2)^{3/4}", ok,
              f"min slack {worst_slack:.3g}, square lhs {res.lhs:.6f} rhs {res.rhs:.6f}")
    assert ok


def test_criterion_10_square_proposition(criterion):
    sc = square_conjectured()
    mu = measure_of_segments(sc.segments)
    betas = [k * math.pi / 24 for k in range(1, 7)]
    rows = proposition_square(mu, sc.length, betas, sc.domain)
    at_30 = proposition_square(mu, sc.length, [math.pi / 6], sc.domain)[0]
    closed_rhs = (sc.length - 2) / (1 - math.cos(math.pi / 6))
    boundary_rows = proposition_square(measure_of_segments(square_boundary().segments), 4.0, betas,
                                       square_boundary().domain)
    ok = (all(r.satisfied for r in rows)
          and abs(at_30.lhs - 1.00597) <= 1e-5
          and abs(at_30.rhs - closed_rhs) <= 1e-12
          and abs(at_30.rhs - 4.770) <= 2e-3
          and all(r.lhs == 0.0 and r.satisfied for r in boundary_rows))
    criterion(10, "unit-square angular mass bound", ok,
              f"mu_O(J_pi/6) = {at_30.lhs:.5f} <= {at_30.rhs:.4f}; boundary mass 0 on all J_beta")
    assert ok


def test_criterion_11_checker_soundness(criterion):
    t0 = time.perf_counter()
    scenes = [rectangle_three_sides(1.0, 0.01), triangle_tripod(1.0), square_conjectured(),
              disk_half_circle_whiskers(1024)]
    verdicts = {}
    misses = 0
    for k, sc in enumerate(scenes):
        cert = verify(sc.domain, sc.segments)
        verdicts[sc.name] = cert.verdict
        if cert.verdict == CERTIFIED:
            misses += random_lines_hit(sc.domain, sc.segments, 100_000, k)
    two = square_two_sides()
    cert = verify(two.domain, two.segments)
    witness_ok = cert.verdict == NON_OPAQUE and witness_check(two.domain, two.segments, *cert.witness)
    elapsed = time.perf_counter() - t0
    ok = all(v == CERTIFIED for v in verdicts.values()) and witness_ok and misses == 0 and elapsed < 60
    criterion(11, "opacity checker soundness", ok,
              f"4/4 certified={all(v == CERTIFIED for v in verdicts.values())}, witness valid={witness_ok}, "
              f"random-line misses {misses}, {elapsed:.1f}s")
    assert ok


def test_criterion_12_homogeneity(criterion):
    worst = 0.0
    scenes = figure_scenes() + [square_boundary()]
    for sc in scenes:
        mu_o, mu_b = measure_of_segments(sc.segments), measure_of_boundary(sc.domain)
        base = theorem_certificate(mu_o, mu_b, sc.length, sc.domain.perimeter)
        base_d = h_minus2_distance(mu_o, mu_b).value
        for lam in (0.5, 2.0, 10.0):
            big = sc.transformed(lam * np.eye(2))
            bo, bb = measure_of_segments(big.segments), measure_of_boundary(big.domain)
            res = theorem_certificate(bo, bb, big.length, big.domain.perimeter)
            pairs = [(big.length, sc.length), (big.domain.perimeter / 2, sc.domain.perimeter / 2),
                     (h_minus2_distance(bo, bb).value, base_d), (res.lhs_upper, base.lhs_upper),
                     (res.rhs, base.rhs)]
            for new, old in pairs:
                worst = max(worst, abs(new - lam * old) / abs(lam * old))
    ok = worst <= 1e-9
    criterion(12, "homogeneity under scaling by 0.5, 2, 10", ok, f"max rel err {worst:.2e}")
    assert ok


def test_criterion_13_crofton_energy(criterion):
    t0 = time.perf_counter()
    single = crofton_energy(SegmentSet([((0, 0), (1, 0))]))
    collinear = crofton_energy(SegmentSet([((0, 0), (1, 0)), ((1.5, 0), (3, 0))]))
    p, q = [(0, 0), (1, 0)], [(0, 1), (1, 1)]
    value = crofton_energy(SegmentSet([p, q]))
    oracle = crofton_midpoint_oracle(p, q, 10_000)
    rel = abs(value - oracle) / oracle
    elapsed = time.perf_counter() - t0
    ok = single == 0.0 and collinear == 0.0 and rel <= 1e-4 and elapsed < 30
    criterion(13, "Crofton energy", ok,
              f"parallel pair {value:.8f} vs midpoint oracle {oracle:.8f} (rel {rel:.1e}), {elapsed:.1f}s")
    assert ok


def test_criterion_14_optimizer(criterion):
    t0 = time.perf_counter()
    sc = square_boundary()
    cfg = SearchConfig(seed=11)
    best, trace = shorten(sc, cfg)
    best2, trace2 = shorten(sc, cfg)
    cert = verify(best.domain, best.segments)
    elapsed = time.perf_counter() - t0
    ok = (cert.certified and 2.0 <= best.length < 4.0 and trace == trace2
          and best.segments == best2.segments and elapsed < 120)
    criterion(14, "optimizer on square boundary", ok,
              f"length 4 -> {best.length:.6f}, certified={cert.certified}, deterministic={trace == trace2}, "
              f"{elapsed:.1f}s")
    assert ok
