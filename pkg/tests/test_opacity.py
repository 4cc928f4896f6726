import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_lines_hit
from opaqueset.constructions import (
    figure_scenes, random_scene, rectangle, square_boundary, square_conjectured, square_two_sides,
    unit_square,
)
from opaqueset.geometry import ConvexPolygon, SegmentSet, rotation
from opaqueset.opacity import (
    CERTIFIED, INCONCLUSIVE, NON_OPAQUE, coverage_margin, segment_components, verify, witness_check,
)

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("scene", figure_scenes() + [square_boundary()], ids=lambda s: s.name)
def test_figure_scenes_certified(scene):
    cert = verify(scene.domain, scene.segments)
    assert cert.verdict == CERTIFIED
    assert cert.witness is None


def test_two_sides_has_horizontal_witness():
    sc = square_two_sides()
    cert = verify(sc.domain, sc.segments)
    assert cert.verdict == NON_OPAQUE
    theta, offset = cert.witness
    assert theta == pytest.approx(math.pi / 2)
    assert offset == pytest.approx(0.5)
    assert witness_check(sc.domain, sc.segments, theta, offset)


def test_empty_barrier():
    cert = verify(unit_square(), SegmentSet())
    assert cert.verdict == NON_OPAQUE
    assert witness_check(unit_square(), SegmentSet(), *cert.witness)


def test_single_diagonal_not_opaque():
    segs = SegmentSet([((0, 0), (1, 1))])
    cert = verify(unit_square(), segs)
    assert cert.verdict == NON_OPAQUE
    assert witness_check(unit_square(), segs, *cert.witness)


def test_disconnected_pieces_certified_by_sweep():
    dom = ConvexPolygon([(-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1)])
    segs = SegmentSet([((-10, 0), (10, 0)), ((20, -5), (20, 5))])
    cert = verify(dom, segs)
    assert cert.verdict == CERTIFIED
    assert cert.method != "hull"
    assert random_lines_hit(dom, segs, 20_000, 1) == 0


def test_three_pieces_need_joint_certificate():
    # No single far piece blocks a whole cell; the two far pieces do together.
    dom = ConvexPolygon([(-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1)])
    segs = SegmentSet([((-10, 0), (10, 0)), ((20, -5), (20, 0.05)), ((30, -0.05), (30, 5))])
    cert = verify(dom, segs)
    assert cert.verdict == CERTIFIED
    assert cert.n_components == 3
    assert random_lines_hit(dom, segs, 20_000, 2) == 0


def test_near_miss_found():
    dom = ConvexPolygon([(-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1)])
    segs = SegmentSet([((-10, 0), (10, 0)), ((20, -5), (20, -0.001)), ((20, 0.001), (20, 5))])
    cert = verify(dom, segs)
    assert cert.verdict == NON_OPAQUE
    assert witness_check(dom, segs, *cert.witness)


def test_inconclusive_when_sweep_is_too_coarse():
    dom = ConvexPolygon([(-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1)])
    segs = SegmentSet([((-10, 0), (10, 0)), ((20, -5), (20, 0.05)), ((30, -0.05), (30, 5))])
    coarse = verify(dom, segs, n_sweep=64, max_refinements=0)
    assert coarse.verdict == INCONCLUSIVE
    assert coarse.witness is None and coarse.unresolved_cells > 0
    refined = verify(dom, segs, n_sweep=64, max_refinements=4)
    assert refined.unresolved_cells < coarse.unresolved_cells


@settings(max_examples=40)
@given(seeds)
def test_witnesses_are_sound(seed):
    sc = random_scene(seed)
    cert = verify(sc.domain, sc.segments, n_sweep=4096)
    if cert.verdict == NON_OPAQUE:
        assert witness_check(sc.domain, sc.segments, *cert.witness)
    elif cert.verdict == CERTIFIED:
        assert random_lines_hit(sc.domain, sc.segments, 5000, seed) == 0


@settings(max_examples=40)
@given(seeds)
def test_boundary_always_certified(seed):
    sc = random_scene(seed, include_boundary=True)
    assert verify(sc.domain, sc.segments).verdict == CERTIFIED


@settings(max_examples=25)
@given(seeds)
def test_adding_segments_keeps_certificate(seed):
    sc = square_conjectured()
    extra = random_scene(seed, n_segments=2).segments
    assert verify(sc.domain, sc.segments + extra).verdict == CERTIFIED


@settings(max_examples=25)
@given(seeds)
def test_removing_segments_keeps_non_opacity(seed):
    sc = random_scene(seed)
    cert = verify(sc.domain, sc.segments, n_sweep=4096)
    if cert.verdict != NON_OPAQUE or len(sc.segments) < 2:
        return
    fewer = SegmentSet(list(sc.segments)[1:])
    again = verify(sc.domain, fewer, n_sweep=4096)
    assert again.verdict == NON_OPAQUE
    # The old witness still misses the smaller set.
    assert witness_check(sc.domain, fewer, *cert.witness)


@settings(max_examples=25)
@given(seeds, st.floats(0, 2 * math.pi), st.floats(-100, 100), st.floats(-100, 100))
def test_verdict_invariant_under_rigid_motion(seed, phi, dx, dy):
    sc = random_scene(seed)
    moved = sc.transformed(rotation(phi), (dx, dy))
    a = verify(sc.domain, sc.segments, n_sweep=4096)
    b = verify(moved.domain, moved.segments, n_sweep=4096)
    assert a.verdict == b.verdict


def test_deterministic():
    sc = random_scene(7)
    assert verify(sc.domain, sc.segments) == verify(sc.domain, sc.segments)


def test_coverage_margin():
    sc = square_two_sides()
    cov = coverage_margin(sc.domain, sc.segments, math.pi / 2)
    assert cov.uncovered_length == pytest.approx(1.0)
    assert coverage_margin(sc.domain, sc.segments, 0.0).uncovered_length == 0.0


def test_witness_check_rejects_line_missing_domain():
    sc = square_two_sides()
    assert not witness_check(sc.domain, sc.segments, math.pi / 2, 3.0)
    assert not witness_check(sc.domain, sc.segments, 0.0, 0.5)


def test_components():
    ends = np.array([[[0, 0], [1, 0]], [[1, 0], [1, 1]], [[5, 5], [6, 6]]], dtype=float)
    comps = segment_components(ends, 1e-12)
    assert sorted(len(c) for c in comps) == [1, 2]


def test_rectangle_three_sides_thin():
    dom = rectangle(1.0, 1e-3)
    segs = SegmentSet([((0, 0), (0, 1e-3)), ((1, 0), (1, 1e-3)), ((0, 0), (1, 0))])
    assert verify(dom, segs).verdict == CERTIFIED
