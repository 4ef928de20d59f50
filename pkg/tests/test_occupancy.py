import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from zonempc.simenv import OccupancySchedule


def test_weekday_office_hours():
    flags = OccupancySchedule(seed=0, night_prob=0.0).flags_array(96 * 7)
    noon = 12 * 4
    assert flags[noon].tolist() == [1] * 5
    assert flags[3 * 4].sum() == 0
    saturday_noon = 5 * 96 + noon
    assert flags[saturday_noon].sum() == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 2000))
def test_flags_binary_and_deterministic(seed, start):
    s = OccupancySchedule(seed=seed)
    a = s.flags_array(200, start)
    assert set(np.unique(a)) <= {0, 1}
    assert np.array_equal(a, OccupancySchedule(seed=seed).flags_array(200, start))


def test_window_offsets_consistent():
    s = OccupancySchedule(seed=7)
    full = s.flags_array(1000)
    assert np.array_equal(full[300:500], s.flags_array(200, 300))


def test_night_sessions_happen():
    s = OccupancySchedule(seed=1, night_prob=0.5)
    flags = s.flags_array(96 * 14)
    evening = (np.arange(len(flags)) % 96) >= 19 * 4
    assert flags[evening].sum() > 0
