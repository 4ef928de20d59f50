"""First-order RC thermal network for a multi-zone building with setpoint HVAC."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import (
    N_ENV,
    Action,
    EnvironmentState,
    FullState,
    ZoneBuildingState,
    env_to_vector,
)
from .comfort import SUMMER, ComfortParams, compute_pmv

RH_RELAX = 0.05  # per-step relaxation of indoor toward outdoor RH


class SimulationError(RuntimeError):
    pass


def _default_adjacency(n: int) -> np.ndarray:
    """Ring of perimeter zones around a core zone (the last zone) when n >= 3."""
    r = np.full((n, n), np.inf)
    if n == 1:
        return r
    if n == 2:
        r[0, 1] = r[1, 0] = 4.0
        return r
    ring = n - 1
    for i in range(ring):
        j = (i + 1) % ring
        if i != j:
            r[i, j] = r[j, i] = 6.0
        r[i, n - 1] = r[n - 1, i] = 4.0
    return r


@dataclass(frozen=True)
class BuildingConfig:
    n_zones: int = 5
    capacitance: np.ndarray = None  # kWh/degC
    r_out: np.ndarray = None  # degC/kW
    r_between: np.ndarray = None  # degC/kW, inf = not adjacent
    heat_capacity: np.ndarray = None  # kW
    cool_capacity: np.ndarray = None  # kW
    heat_eff: float = 0.95
    cool_cop: float = 3.0
    solar_aperture: np.ndarray = None  # effective m^2
    occupant_gain: np.ndarray = None  # kW while occupied
    dt_minutes: float = 15.0

    def __post_init__(self):
        n = self.n_zones
        if n < 1:
            raise ValueError("need at least one zone")

        def fill(name, default):
            v = getattr(self, name)
            v = np.full(n, default, dtype=float) if v is None else np.broadcast_to(np.asarray(v, float), (n,)).copy()
            object.__setattr__(self, name, v)

        fill("capacitance", 6.0)
        if self.r_out is None:
            r = np.full(n, 4.0)
            if n >= 5:
                r[n - 1] = 8.0  # core zone, roof exposure only
            object.__setattr__(self, "r_out", r)
        fill("r_out", 4.0)
        fill("heat_capacity", 6.0)
        fill("cool_capacity", 10.0)
        fill("occupant_gain", 1.0)
        if self.solar_aperture is None:
            ap = np.full(n, 3.0)
            if n >= 3:
                ap[2] = 4.5  # south-facing zone
            if n >= 5:
                ap[n - 1] = 1.0  # core zone, skylights only
            object.__setattr__(self, "solar_aperture", ap)
        else:
            fill("solar_aperture", 0.0)
        if self.r_between is None:
            object.__setattr__(self, "r_between", _default_adjacency(n))
        rb = np.asarray(self.r_between, dtype=float)
        object.__setattr__(self, "r_between", rb)

        if rb.shape != (n, n) or not np.array_equal(rb, rb.T):
            raise ValueError("inter-zone resistance matrix must be symmetric n x n")
        for name in ("capacitance", "r_out", "heat_capacity", "cool_capacity"):
            if np.any(getattr(self, name) <= 0):
                raise ValueError(f"{name} must be positive")
        if self.heat_eff <= 0 or self.cool_cop <= 0 or self.dt_minutes <= 0:
            raise ValueError("efficiencies and timestep must be positive")
        if np.any(self.solar_aperture < 0) or np.any(self.occupant_gain < 0):
            raise ValueError("solar aperture and occupant gain must be non-negative")

    @property
    def dt_hours(self) -> float:
        return self.dt_minutes / 60.0

    def conductance_between(self) -> np.ndarray:
        g = np.zeros_like(self.r_between)
        finite = np.isfinite(self.r_between)
        g[finite] = 1.0 / self.r_between[finite]
        np.fill_diagonal(g, 0.0)
        return g

    def max_zone_energy(self) -> np.ndarray:
        """Upper bound of one zone's HVAC energy in one step, kWh."""
        return (self.heat_capacity / self.heat_eff + self.cool_capacity / self.cool_cop) * self.dt_hours


def thermal_step(cfg: BuildingConfig, temps, rh, heat_sp, cool_sp, env_vec):
    """Vectorized zone update.

    ``temps``, ``rh``, ``heat_sp``, ``cool_sp`` have shape (..., N); ``env_vec``
    has shape (..., 7+N) and holds the environment during the step. Returns
    (next temps, next rh, heat kWh, cool kWh).

    The HVAC tracks setpoints ideally: it supplies just enough heat (cooling)
    to hold the end-of-step temperature at the heating (cooling) setpoint,
    limited by capacity, and idles inside the deadband.
    """
    temps = np.asarray(temps, dtype=float)
    env_vec = np.asarray(env_vec, dtype=float)
    t_out = env_vec[..., 0:1]
    rh_out = env_vec[..., 1:2]
    solar = env_vec[..., 2:3] + env_vec[..., 3:4]
    occ = env_vec[..., N_ENV : N_ENV + cfg.n_zones]
    dt = cfg.dt_hours

    g = cfg.conductance_between()
    inter = temps @ g - temps * g.sum(axis=1)
    flux = (t_out - temps) / cfg.r_out + inter + cfg.solar_aperture * solar / 1000.0 + occ * cfg.occupant_gain
    t_free = temps + dt / cfg.capacitance * flux

    need_heat = (heat_sp - t_free) * cfg.capacitance / dt
    need_cool = (t_free - cool_sp) * cfg.capacitance / dt
    q_heat = np.where(need_heat > 0, np.minimum(cfg.heat_capacity, need_heat), 0.0)
    q_cool = np.where((need_cool > 0) & ~(need_heat > 0), np.minimum(cfg.cool_capacity, need_cool), 0.0)
    q = q_heat - q_cool

    t_next = t_free + dt / cfg.capacitance * q
    rh_next = rh + RH_RELAX * (rh_out - rh)
    heat_kwh = q_heat * dt / cfg.heat_eff
    cool_kwh = q_cool * dt / cfg.cool_cop
    return t_next, rh_next, heat_kwh, cool_kwh


@dataclass
class BuildingSimulator:
    """Ground-truth environment: advances a FullState by one control step."""

    config: BuildingConfig = field(default_factory=BuildingConfig)
    comfort: ComfortParams = SUMMER

    def initial_state(self, env: EnvironmentState, temp: float | np.ndarray = 22.0, rh: float = 0.45) -> FullState:
        n = self.config.n_zones
        temps = np.broadcast_to(np.asarray(temp, dtype=float), (n,))
        pmv = compute_pmv(temps, np.full(n, rh), self.comfort)
        zones = tuple(ZoneBuildingState(float(temps[i]), rh, float(pmv[i]), 0.0, 0.0) for i in range(n))
        return FullState(zones, env)

    def step(self, state: FullState, action: Action, next_env: EnvironmentState):
        """Apply ``action`` during one step under ``state.env``.

        Returns (next FullState, heat kWh per zone, cool kWh per zone).
        """
        if not action.within_bounds():
            raise ValueError("action outside setpoint bounds")
        temps = np.array([z.temp_in for z in state.zones])
        rh = np.array([z.rh_in for z in state.zones])
        t_next, rh_next, heat, cool = thermal_step(
            self.config,
            temps,
            rh,
            np.asarray(action.heat_sp),
            np.asarray(action.cool_sp),
            env_to_vector(state.env),
        )
        if not (np.all(np.isfinite(t_next)) and np.all(np.isfinite(rh_next))):
            raise SimulationError("non-finite zone state; check building configuration")
        rh_next = np.clip(rh_next, 0.0, 1.0)
        pmv = compute_pmv(np.clip(t_next, -10, 50), rh_next, self.comfort)
        zones = tuple(
            ZoneBuildingState(float(t_next[i]), float(rh_next[i]), float(pmv[i]), float(heat[i]), float(cool[i]))
            for i in range(self.config.n_zones)
        )
        return FullState(zones, next_env), heat, cool

    def predict_building(self, s, a, e):
        """Batched next building-state vector from (s, a, e) vectors.

        Lets the simulator stand in as a perfect dynamics model.
        """
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        n = self.config.n_zones
        zs = s.reshape(s.shape[:-1] + (n, 5))
        t_next, rh_next, heat, cool = thermal_step(
            self.config, zs[..., 0], zs[..., 1], a[..., 0::2], a[..., 1::2], np.asarray(e, dtype=float)
        )
        rh_next = np.clip(rh_next, 0.0, 1.0)
        pmv = compute_pmv(np.clip(t_next, -10, 50), rh_next, self.comfort)
        out = np.stack([t_next, rh_next, np.broadcast_to(pmv, t_next.shape), heat, cool], axis=-1)
        return out.reshape(s.shape)
