import pytest

from opaqueset.constructions import square_boundary, square_conjectured, square_two_sides
from opaqueset.errors import ParameterError, PreconditionError
from opaqueset.opacity import verify
from opaqueset.optimizer import SearchConfig, shorten


def test_square_boundary_gets_shorter():
    sc = square_boundary()
    best, trace = shorten(sc, SearchConfig(seed=1, max_iters=150))
    assert 2.0 <= best.length < 4.0
    assert verify(best.domain, best.segments).certified
    lengths = [length for _, length in trace]
    assert all(b <= a for a, b in zip(lengths, lengths[1:]))
    assert trace[0] == (0, pytest.approx(4.0))


def test_trace_is_deterministic_per_seed():
    cfg = SearchConfig(seed=5, max_iters=60)
    a = shorten(square_boundary(), cfg)
    b = shorten(square_boundary(), cfg)
    assert a[1] == b[1]
    assert a[0].segments == b[0].segments


def test_zero_iterations_returns_input():
    sc = square_conjectured()
    best, trace = shorten(sc, SearchConfig(max_iters=0))
    assert best is sc
    assert trace == [(0, sc.length)]


def test_conjectured_square_is_locally_stable():
    sc = square_conjectured()
    best, _ = shorten(sc, SearchConfig(seed=3, max_iters=100, step_initial=1e-3))
    assert best.length == pytest.approx(sc.length, abs=1e-3)
    assert best.length >= sc.domain.perimeter / 2 - 1e-9


def test_non_opaque_input_rejected():
    with pytest.raises(PreconditionError):
        shorten(square_two_sides(), SearchConfig(max_iters=5))


def test_restarts_pick_the_shortest():
    cfg = SearchConfig(seed=2, max_iters=40, n_restarts=3)
    best, _ = shorten(square_boundary(), cfg)
    singles = [shorten(square_boundary(), SearchConfig(seed=2, max_iters=40, n_restarts=1))[0].length]
    assert best.length <= min(singles) + 1e-12


def test_bias_keeps_invariants():
    best, trace = shorten(square_boundary(), SearchConfig(seed=4, max_iters=60, bias_weight=0.5))
    assert verify(best.domain, best.segments).certified
    assert best.length <= 4.0


@pytest.mark.parametrize("kwargs", [
    {"step_initial": 0.0}, {"step_decay": 1.5}, {"delete_probability": -0.1},
    {"delete_probability": 0.7, "shrink_probability": 0.7}, {"n_restarts": 0}, {"max_iters": -1},
])
def test_config_validation(kwargs):
    with pytest.raises(ParameterError):
        SearchConfig(**kwargs)
