"""Moment recursion, variance dynamics, and stability bounds."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from gwolf.mcverify import SimConfig, simulate_stagnation
from gwolf.moments import (central_moment_update, coeff_a_moment,
                           coeff_c_moment, gap_table, leader_spread,
                           moment_trajectory, raw_from_central,
                           stability_bounds, uniform_offset_moment,
                           variance_attractor, variance_gain,
                           variance_sequence, variance_step)


def test_uniform_offset_moment_examples():
    assert uniform_offset_moment(0, -1.0, 3.0, 0.7) == 1.0
    assert uniform_offset_moment(1, -2.0, 4.0, 1.0) == 0.0
    assert abs(uniform_offset_moment(2, -4.0, 4.0, 0.0) - 16.0 / 3.0) < 1e-15


def test_uniform_offset_moment_matches_quadrature():
    r = np.random.default_rng(3)
    for _ in range(20):
        lo = r.uniform(-3, 0)
        hi = lo + r.uniform(0.5, 4)
        c = r.uniform(-2, 2)
        k = int(r.integers(0, 7))
        want, _ = quad(lambda u: (u - c) ** k / (hi - lo), lo, hi)
        assert abs(uniform_offset_moment(k, lo, hi, c) - want) < 1e-10


def test_uniform_offset_moment_validation():
    with pytest.raises(ValueError):
        uniform_offset_moment(-1, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        uniform_offset_moment(2, 1.0, 1.0, 0.0)


def test_driver_moments():
    assert abs(coeff_a_moment(2, 2.0) - 4.0 / 3.0) < 1e-15
    assert coeff_a_moment(3, 2.0) == 0.0
    assert coeff_a_moment(0, 1.3) == 1.0
    assert abs(coeff_c_moment(1) - 1.0) < 1e-15
    assert abs(coeff_c_moment(4) - 16.0 / 5.0) < 1e-15
    with pytest.raises(ValueError):
        coeff_a_moment(-1, 1.0)


def test_central_step_matches_closed_form_variance():
    r = np.random.default_rng(41)
    for _ in range(1000):
        p = tuple(r.uniform(-3, 3, 3))
        a = r.uniform(0.05, 2.0)
        ex = r.uniform(-2, 2)
        ex2 = ex * ex + r.uniform(0.01, 4.0)
        generic = central_moment_update(2, a, p, [1.0, ex, ex2])
        sp, sp2 = sum(p), sum(v * v for v in p)
        closed = (a * a / 9.0) * (ex2 - (2.0 / 3.0) * sp * ex
                                  + (4.0 / 9.0) * sp2)
        assert abs(generic - closed) <= 1e-12 * abs(closed)


def test_central_step_zero_leaders():
    raw = [1.0, 0.3, 0.7]
    got = central_moment_update(2, 2.0, (0.0, 0.0, 0.0), raw)
    assert abs(got - (4.0 / 9.0) * 0.7) < 1e-15


def test_central_step_odd_orders_vanish():
    raw = [1.0, 0.5, 1.0, 2.0, 5.0, 14.0]
    for r_odd in (1, 3, 5):
        assert central_moment_update(r_odd, 1.7, (1.0, -0.5, 2.0), raw) == 0.0


def test_central_step_validation():
    with pytest.raises(ValueError):
        central_moment_update(-2, 1.0, (0, 0, 0), [1.0])
    with pytest.raises(ValueError):
        central_moment_update(4, 1.0, (0, 0, 0), [1.0, 0.0])


def test_central_step_fourth_order_against_mc():
    # x(t) frozen at zero, unit leaders: fourth moment of the driver average
    exact = central_moment_update(4, 2.0, (1.0, 1.0, 1.0),
                                  [1.0, 0.0, 0.0, 0.0, 0.0])
    r = np.random.default_rng(97)
    n = 10_000_000
    total = 0.0
    total_sq = 0.0
    for _ in range(10):
        m = n // 10
        amp = r.uniform(-2, 2, size=(m, 3))
        cof = r.uniform(0, 2, size=(m, 3))
        s = ((amp * np.abs(cof)).sum(axis=1) / 3.0) ** 4
        total += s.sum()
        total_sq += (s * s).sum()
    mc = total / n
    se = math.sqrt((total_sq / n - mc * mc) / n)
    assert abs(exact - mc) < 3 * se


def test_raw_from_central():
    assert raw_from_central(2, 0.0, [1.0, 0.1, 0.5]) == 0.5  # c = 0 identity
    assert raw_from_central(1, 1.7, [1.0, 0.0]) == 1.7
    assert abs(raw_from_central(2, 1.0, [1.0, 0.0, 1.0 / 3.0]) - 4.0 / 3.0) < 1e-15


def test_leader_spread_nonnegative_and_zero_cases():
    assert leader_spread((0.0, 0.0, 0.0)) == 0.0
    assert leader_spread((1.0, 1.0, 1.0)) == pytest.approx(1.0 / 3.0)
    r = np.random.default_rng(13)
    for _ in range(200):
        assert leader_spread(r.normal(size=3) * 3) >= 0.0


def test_leader_spread_decomposition():
    # (1/9)[sum p^2 + sum of pairwise squared gaps], hence nonnegative
    r = np.random.default_rng(101)
    for _ in range(100):
        p = r.normal(size=3) * 2
        decomp = (np.sum(p * p) + sum((p[i] - p[j]) ** 2
                                      for i in range(3)
                                      for j in range(i + 1, 3))) / 9.0
        assert leader_spread(p) == pytest.approx(decomp, rel=1e-12, abs=1e-15)


def test_variance_gain_range():
    for T in (5, 50, 333):
        gains = [variance_gain(t, T) for t in range(1, T + 1)]
        assert all(0.0 <= b < 4.0 / 9.0 for b in gains)
        assert gains[-1] == 0.0


def test_variance_step_examples():
    assert variance_step(0.5, 25, 50, (0.0, 0.0, 0.0)) == pytest.approx(
        variance_gain(25, 50) * 0.5)
    assert variance_step(3.0, 50, 50, (1.0, 2.0, 3.0)) == 0.0  # a(T) = 0
    # b = 4/9 at t/T -> 0: approximate with huge T
    got = variance_step(0.0, 1, 10**9, (1.0, 1.0, 1.0))
    assert got == pytest.approx(4.0 / 27.0, rel=1e-6)


def test_attractor_values():
    assert variance_attractor(50, 50, (1.0, 2.0, 3.0)) == 0.0
    assert variance_attractor(7, 50, (0.0, 0.0, 0.0)) == 0.0
    # b = 4/9, p0 = 1/3 -> 4/15
    b = variance_gain(1, 10**9)
    p0 = leader_spread((1.0, 1.0, 1.0))
    assert b * p0 / (1 - b) == pytest.approx(4.0 / 15.0, rel=1e-6)


def test_trajectory_matches_variance_sequence():
    p = (-1.0, 1.5, 2.5)
    traj = moment_trajectory(2, p, 60)
    seq = variance_sequence(p, 60)
    rel = np.abs(traj.sigma(2) - seq) / np.abs(seq)
    assert np.max(rel) < 1e-12


def test_trajectory_invariants():
    p = (0.4, -0.8, 1.9)
    traj = moment_trajectory(8, p, 40)
    c = sum(p) / 3.0
    assert np.all(traj.central[:, 0] == 1.0)
    for r_odd in (1, 3, 5, 7):
        assert np.all(traj.central[1:, r_odd] == 0.0)
    assert np.all(traj.raw[1:, 1] == c)          # exact order-1 stability
    assert np.all(traj.sigma(2) >= 0.0)
    assert np.all(traj.sigma(4) >= 0.0)


def test_trajectory_validation():
    with pytest.raises(ValueError):
        moment_trajectory(3, (0, 0, 0), 10)
    with pytest.raises(ValueError):
        moment_trajectory(2, (0, 0, 0), 1)


def test_trajectory_variance_matches_mc():
    p = (-1.0, 1.5, 2.5)
    T = 60
    cfg = SimConfig(p=p, T=T, trials=100_000, seed=404)
    st = simulate_stagnation(cfg, keep_samples=False)
    seq = variance_sequence(p, T)
    rel = np.abs(st.var[1:30] - seq[1:30]) / seq[1:30]
    assert np.max(rel) < 0.02


def test_stability_bounds_shapes():
    p = (1.0, -0.5, 2.0)
    d1 = 16.0 / 3.0
    geo1, _ = stability_bounds(d1, 1, p, 50)
    b1 = variance_gain(1, 50)
    p0 = leader_spread(p)
    assert geo1 == abs(d1 - b1 * p0 / (1 - b1))
    with pytest.raises(ValueError):
        stability_bounds(d1, 0, p, 50)


def test_terminal_bound_dominates_exact_recursion():
    r = np.random.default_rng(71)
    for _ in range(100):
        p = tuple(r.uniform(-3, 3, 3))
        T = int(r.integers(20, 501))
        seq = variance_sequence(p, T)
        _, bound = stability_bounds(seq[0], T, p, T)
        assert seq[-1] < bound


def test_terminal_bound_vanishes_like_one_over_T():
    p = (1.0, 0.5, -0.3)
    p0 = leader_spread(p)
    d1 = 6.0
    bounds = [stability_bounds(d1, T, p, T)[1] for T in (100, 1000, 10000)]
    assert bounds[0] > bounds[1] > bounds[2]
    # T * bound approaches the constant 4 p0 / 9
    assert bounds[2] * 10000 == pytest.approx(4.0 * p0 / 9.0, rel=0.01)


def test_attractor_gap_contraction_chain():
    # one-step inequality behind the geometric envelope:
    # gap(t+1) <= (4/9) gap(t) + (81/25) p0 (b_t - b_{t+1})
    r = np.random.default_rng(83)
    for _ in range(50):
        p = tuple(r.uniform(-3, 3, 3))
        T = int(r.integers(30, 400))
        p0 = leader_spread(p)
        seq = variance_sequence(p, T)
        for t in range(1, T - 1):
            gap_next = abs(seq[t] - variance_attractor(t + 1, T, p))
            gap_here = abs(seq[t - 1] - variance_attractor(t, T, p))
            drift = (81.0 / 25.0) * p0 * (variance_gain(t, T)
                                          - variance_gain(t + 1, T))
            assert gap_next <= (4.0 / 9.0) * gap_here + drift + 1e-12


def test_gap_table_trend():
    p = (-1.0, 1.5, 2.5)
    rows = gap_table(p, (20, 30, 50, 100, 200, 500))
    gaps = [r[1] for r in rows]
    assert all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1))
    assert all(r[1] < r[2] for r in rows)


def test_trajectory_csv_columns(tmp_path):
    traj = moment_trajectory(4, (0.5, 1.0, -0.2), 12)
    path = traj.to_csv(tmp_path / "traj.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "t,sigma2,E,D0,bound_cor31,sigma4"
    assert len(lines) == 13
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[2]) == pytest.approx(0.0)  # uniform init mean
