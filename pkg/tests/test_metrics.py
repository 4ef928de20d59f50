import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zonempc.harness import MetricsReport, Results, compute_metrics, savings


def make_results(pmv, heat=None, cool=None, start=0):
    pmv = np.asarray(pmv, dtype=float)
    t, n = pmv.shape
    z = np.zeros((t, n))
    return Results(np.arange(start, start + t), z + 24.0, pmv, z if heat is None else np.asarray(heat, float),
                   z if cool is None else np.asarray(cool, float), z + 20.0, z + 26.0, -np.ones(t))


def test_violation_rate_counts_occupied_steps_only():
    pmv = np.array([[0.0, 1.0], [0.8, 0.1], [2.0, -2.0]])
    occ = np.array([[1, 1], [1, 1], [0, 0]])
    m = compute_metrics(make_results(pmv), occupancy=occ)
    assert m.violation_rate == 0.5
    assert m.occupied_zone_steps == 4
    assert m.pmv_mean == pytest.approx(np.mean([0.0, 1.0, 0.8, 0.1]))


def test_no_violations_and_zero_energy():
    m = compute_metrics(make_results(np.full((4, 5), 0.3)), occupancy=np.ones((4, 5)))
    assert m.violation_rate == 0.0
    assert m.total_kwh == 0.0 and m.heat_kwh == 0.0


def test_unoccupied_run_has_no_comfort_stats():
    m = compute_metrics(make_results(np.full((3, 2), 2.0)), occupancy=np.zeros((3, 2)))
    assert m.violation_rate == 0.0 and math.isnan(m.pmv_mean)


def test_energy_totals_and_per_zone():
    heat = np.array([[1.0, 0.0], [0.5, 0.25]])
    cool = np.array([[0.0, 2.0], [0.0, 0.0]])
    m = compute_metrics(make_results(np.zeros((2, 2)), heat, cool), occupancy=np.ones((2, 2)))
    assert m.heat_kwh == 1.75 and m.cool_kwh == 2.0 and m.total_kwh == 3.75
    assert m.zone_heat_kwh == (1.5, 0.25) and m.zone_cool_kwh == (0.0, 2.0)


def test_episode_rewards_split_by_month():
    r = make_results(np.zeros((4, 1)), start=2974)
    m = compute_metrics(r, occupancy=np.ones((4, 1)))
    assert m.episode_rewards == (-2.0, -2.0) and m.total_reward == -4.0


def test_schedule_occupancy_is_next_step(rule_trace):
    from zonempc.simenv import OccupancySchedule

    res = Results.from_trace(rule_trace)
    sched = OccupancySchedule(seed=11)
    m = compute_metrics(res, sched)
    expected = np.array([t.next_state.env.occupancy for t in rule_trace.transitions], dtype=bool)
    assert m.occupied_zone_steps == int(expected.sum())


def test_errors():
    with pytest.raises(ValueError):
        compute_metrics(make_results(np.zeros((0, 2))), occupancy=np.zeros((0, 2)))
    with pytest.raises(ValueError):
        compute_metrics(make_results(np.zeros((2, 2))), occupancy=np.zeros((3, 2)))
    with pytest.raises(ValueError):
        compute_metrics(make_results(np.zeros((2, 2))))
    with pytest.raises(ValueError):
        MetricsReport(-1.0, 0.0, (), (), 0.0, 0.0, 0.0, (), 0, 0)


def test_savings():
    assert savings(100.0, 90.0) == pytest.approx(0.1)
    assert savings(0.0, 0.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(1, 5), st.integers(0, 2**31))
def test_violation_rate_in_unit_interval(t, n, seed):
    g = np.random.default_rng(seed)
    m = compute_metrics(make_results(g.normal(0, 1, (t, n)), g.uniform(0, 1, (t, n))), occupancy=g.random((t, n)) < 0.5)
    assert 0.0 <= m.violation_rate <= 1.0 and m.total_kwh >= 0
