"""Comfort/energy reward: R = -sum_i (rho_i * Norm(|PMV_i|) + Norm(E_i))."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import N_ZONE, MinMaxBounds, minmax_norm

PMV_COL, HEAT_COL, COOL_COL = 2, 3, 4


@dataclass(frozen=True)
class RewardConfig:
    rho_occupied: float = 4.0
    rho_unoccupied: float = 0.1
    pmv_bounds: MinMaxBounds = MinMaxBounds(0.0, 3.0)
    energy_bounds: MinMaxBounds = MinMaxBounds(0.0, 3.0)  # per zone per step, kWh

    def __post_init__(self):
        if self.rho_occupied <= 0 or self.rho_unoccupied <= 0:
            raise ValueError("rho values must be positive")

    @classmethod
    def for_building(cls, config, **kw) -> "RewardConfig":
        """Energy bound = max per-zone step energy (P_h/eta_h + P_c/COP) * dt."""
        e_max = float(np.max(config.max_zone_energy()))
        return cls(energy_bounds=MinMaxBounds(0.0, e_max), **kw)


def reward_from_arrays(pmv, energy, occupancy, cfg: RewardConfig):
    """Vectorized reward; inputs have shape (..., N) and are summed over zones."""
    rho = np.where(np.asarray(occupancy) > 0.5, cfg.rho_occupied, cfg.rho_unoccupied)
    per_zone = rho * minmax_norm(np.abs(pmv), cfg.pmv_bounds) + minmax_norm(energy, cfg.energy_bounds)
    return -per_zone.sum(axis=-1)


def reward_from_building(building, occupancy, cfg: RewardConfig):
    """Reward of building-state vectors of shape (..., 5N)."""
    b = np.asarray(building, dtype=float)
    z = b.reshape(b.shape[:-1] + (-1, N_ZONE))
    return reward_from_arrays(z[..., PMV_COL], z[..., HEAT_COL] + z[..., COOL_COL], occupancy, cfg)


def reward(zones, occupancy, cfg: RewardConfig) -> float:
    """Reward for a sequence of ZoneBuildingState and matching occupancy flags."""
    pmv = np.array([z.pmv for z in zones])
    energy = np.array([z.heat_energy + z.cool_energy for z in zones])
    return float(reward_from_arrays(pmv, energy, np.asarray(occupancy), cfg))
