"""Optimizer core: schedule, leader cascade, position update, full loop."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwolf import core, rng
from gwolf.core import (EvaluationError, LeaderTriple, run_gwo, schedule_a,
                        update_agent, update_leaders)
from gwolf.dist import update_box
from gwolf.objectives import Objective, make_objective


def test_schedule_values():
    assert schedule_a(60, 60) == 0.0
    assert schedule_a(30, 60) == 1.0
    assert schedule_a(15, 60) == 1.5
    assert 0.0 < schedule_a(1, 100) < 2.0


def test_schedule_rejects_bad_iterations():
    with pytest.raises(ValueError):
        schedule_a(0, 10)
    with pytest.raises(ValueError):
        schedule_a(11, 10)
    with pytest.raises(ValueError):
        schedule_a(1, 0)


def _triple(f1=1.0, f2=2.0, f3=3.0):
    return LeaderTriple(np.array([1.0]), np.array([2.0]), np.array([3.0]),
                        f1, f2, f3)


def test_leader_ordering_enforced():
    with pytest.raises(ValueError):
        _triple(3.0, 2.0, 1.0)


def test_cascade_no_branch_for_bad_candidate():
    t = _triple()
    assert update_leaders(t, np.array([9.0]), 3.0) is t
    assert update_leaders(t, np.array([9.0]), 5.0) is t


def test_cascade_tie_with_best_replaces_second():
    t = update_leaders(_triple(), np.array([9.0]), 1.0)
    assert t.p1[0] == 1.0 and t.p2[0] == 9.0
    assert (t.f1, t.f2, t.f3) == (1.0, 1.0, 3.0)


def test_cascade_replaces_exactly_one_slot():
    t = update_leaders(_triple(), np.array([9.0]), 0.0)
    assert t.p1[0] == 9.0 and t.p2[0] == 2.0 and t.p3[0] == 3.0
    assert (t.f1, t.f2, t.f3) == (0.0, 2.0, 3.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30))
def test_cascade_keeps_order_under_any_sequence(fs):
    t = _triple(0.0, 10.0, 20.0)
    for i, f in enumerate(fs):
        t = update_leaders(t, np.array([float(i)]), f)
        assert t.f1 <= t.f2 <= t.f3


def test_update_agent_zero_coefficient_is_leader_mean():
    leaders = LeaderTriple(np.array([1.0, -2.0]), np.array([0.5, 4.0]),
                           np.array([-1.0, 1.0]), 1.0, 2.0, 3.0)
    out = update_agent(np.array([3.0, 3.0]), leaders, 0.0,
                       rng.update_stream(1, 0, 1))
    assert np.array_equal(out, (leaders.p1 + leaders.p2 + leaders.p3) / 3.0)


def test_update_agent_all_zero_is_zero():
    z = np.zeros(2)
    leaders = LeaderTriple(z, z, z, 0.0, 0.0, 0.0)
    out = update_agent(z, leaders, 2.0, rng.update_stream(1, 0, 1))
    assert np.array_equal(out, z)


def test_update_agent_rejects_bad_inputs():
    leaders = LeaderTriple(np.zeros(2), np.zeros(2), np.zeros(2), 0, 0, 0)
    with pytest.raises(ValueError):
        update_agent(np.zeros(2), leaders, 2.5, rng.update_stream(1, 0, 1))
    with pytest.raises(ValueError):
        update_agent(np.zeros(3), leaders, 1.0, rng.update_stream(1, 0, 1))


def test_update_agent_matches_vectorized_block():
    leaders = LeaderTriple(np.array([1.0, -2.0, 0.5]),
                           np.array([0.3, 0.1, 0.2]),
                           np.array([-1.0, 2.0, 3.0]), 1.0, 2.0, 3.0)
    X = np.array([[3.0, 1.0, -0.5], [0.0, 0.0, 0.0], [5.0, -5.0, 2.0]])
    vec = core._update_block(X, leaders.stacked(), 1.37, 42, 7, 0)
    for i in range(3):
        scalar = update_agent(X[i], leaders, 1.37, rng.update_stream(42, i, 7))
        assert np.array_equal(scalar, vec[i])


def test_update_agent_mean_matches_symmetry():
    # all leaders at 1, x = 3, a = 2: output is symmetric about 1
    ones = np.ones(1)
    leaders = LeaderTriple(ones, ones, ones, 1.0, 1.0, 1.0)
    n = 100_000
    out = core._update_block(np.full((n, 1), 3.0), leaders.stacked(), 2.0,
                             909, 1, 0)[:, 0]
    se = out.std(ddof=1) / np.sqrt(n)
    assert abs(out.mean() - 1.0) < 4 * se


def test_update_stays_inside_analytic_box():
    r = np.random.default_rng(3)
    for _ in range(50):
        p1, p2, p3 = (r.normal(size=3) for _ in range(3))
        x = r.normal(size=3) * 2
        a = r.uniform(0.1, 2.0)
        leaders = LeaderTriple(p1, p2, p3, 0.0, 1.0, 2.0)
        box = update_box(a, p1, p2, p3, x)
        out = core._update_block(np.tile(x, (40, 1)), leaders.stacked(), a,
                                 int(r.integers(1 << 30)), 1, 0)
        assert np.all(box.contains(out))


def test_run_gwo_trace_monotone_and_improving():
    obj = make_objective("sphere", 10)
    res = run_gwo(obj, 30, 200, seed=5)
    assert np.all(np.diff(res.trace) <= 0)
    assert res.best_fitness < res.initial_fitness
    assert res.trace[-1] == res.best_fitness


def test_run_gwo_single_iteration_three_agents():
    obj = make_objective("sphere", 4)
    res = run_gwo(obj, 3, 1, seed=9)
    assert res.trace.shape == (1,)
    assert res.best_fitness <= res.initial_fitness


def test_run_gwo_deterministic_and_worker_independent():
    obj = make_objective("rastrigin", 6)
    a = run_gwo(obj, 12, 80, seed=31)
    b = run_gwo(obj, 12, 80, seed=31)
    c = run_gwo(obj, 12, 80, seed=31, workers=3)
    assert np.array_equal(a.trace, b.trace)
    assert np.array_equal(a.trace, c.trace)
    assert np.array_equal(a.best_position, c.best_position)
    d = run_gwo(obj, 12, 80, seed=32)
    assert not np.array_equal(a.trace, d.trace)


def test_run_gwo_requires_three_agents():
    obj = make_objective("sphere", 3)
    with pytest.raises(ValueError):
        run_gwo(obj, 2, 10, seed=1)
    with pytest.raises(ValueError):
        run_gwo(obj, 5, 0, seed=1)


def test_run_gwo_clamp_keeps_positions_in_bounds():
    obj = make_objective("sphere", 3)
    res = run_gwo(obj, 8, 40, seed=2, clamp=True)
    assert np.all(np.abs(res.best_position) <= 100.0)


def test_run_gwo_surfaces_non_finite_objective():
    def bad(x):
        out = np.sum(x * x, axis=1)
        out[out > 0] = np.nan
        return out

    obj = Objective(name="bad", dim=2, lower=np.full(2, -1.0),
                    upper=np.full(2, 1.0), batch_fn=bad)
    with pytest.raises(EvaluationError) as err:
        run_gwo(obj, 4, 5, seed=1)
    assert err.value.position.shape == (2,)


def test_objective_registry():
    with pytest.raises(ValueError):
        make_objective("unknown", 3)
    with pytest.raises(ValueError):
        make_objective("sphere", 0)
    ras = make_objective("rastrigin", 2)
    assert ras.evaluate(np.zeros(2)) == 0.0
    ros = make_objective("rosenbrock", 2)
    assert ros.evaluate(np.ones(2)) == 0.0
