import numpy as np
import pytest

from zonempc.control import RewardConfig, reward, reward_from_arrays, reward_from_building
from zonempc.core import MinMaxBounds, ZoneBuildingState
from zonempc.simenv import BuildingConfig

CFG = RewardConfig(pmv_bounds=MinMaxBounds(0, 3), energy_bounds=MinMaxBounds(0, 1))


def test_zero_reward_when_comfortable_and_idle():
    zones = [ZoneBuildingState(24.0, 0.5, 0.0) for _ in range(5)]
    assert reward(zones, [1] * 5, CFG) == 0.0


def test_occupied_single_zone():
    # Norm(|PMV|) = 1.5/3 = 0.5, Norm(E) = 0.2
    assert reward([ZoneBuildingState(24, 0.5, -1.5, 0.2, 0.0)], [1], CFG) == pytest.approx(-2.2)


def test_unoccupied_single_zone():
    assert reward([ZoneBuildingState(24, 0.5, 1.5, 0.1, 0.1)], [0], CFG) == pytest.approx(-0.25)


def test_energy_bound_from_building():
    b = BuildingConfig()
    cfg = RewardConfig.for_building(b)
    expected = (6.0 / 0.95 + 10.0 / 3.0) * 0.25
    assert cfg.energy_bounds.hi == pytest.approx(expected)
    assert cfg.rho_occupied == 4.0 and cfg.rho_unoccupied == 0.1


def test_vectorized_matches_scalar(rng):
    pmv = rng.uniform(-3, 3, (7, 5))
    energy = rng.uniform(0, 1, (7, 5))
    occ = rng.integers(0, 2, (7, 5))
    vec = reward_from_arrays(pmv, energy, occ, CFG)
    for k in range(7):
        zones = [ZoneBuildingState(22.0, 0.5, pmv[k, i], energy[k, i], 0.0) for i in range(5)]
        assert vec[k] == pytest.approx(reward(zones, occ[k], CFG))
    building = np.zeros((7, 25))
    building[:, 2::5] = pmv
    building[:, 3::5] = 0.5 * energy
    building[:, 4::5] = 0.5 * energy
    assert np.allclose(reward_from_building(building, occ, CFG), vec)


def test_reward_clips_extremes():
    assert reward([ZoneBuildingState(24, 0.5, 9.0, 5.0, 0.0)], [1], CFG) == pytest.approx(-5.0)


def test_rho_must_be_positive():
    with pytest.raises(ValueError):
        RewardConfig(rho_unoccupied=0.0)
