"""Closed-loop episodes on the building simulator."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import N_ENV, STEPS_PER_MONTH, Transition, env_from_vector
from ..control.reward import RewardConfig, reward
from .building import BuildingConfig, BuildingSimulator
from .comfort import SUMMER, ComfortParams
from .occupancy import OccupancySchedule
from .weather import WeatherSeries


class ControllerError(RuntimeError):
    def __init__(self, step: int, cause: BaseException):
        super().__init__(f"controller failed at step {step}: {cause!r}")
        self.step = step


class Exogenous:
    """Ground-truth environment vectors (weather + occupancy) by step.

    Lookups past the end of the weather repeat the last row so that
    forecasts near the end of an episode stay defined.
    """

    def __init__(self, weather: WeatherSeries, schedule: OccupancySchedule):
        self.n_zones = schedule.n_zones
        occ = schedule.flags_array(len(weather))
        self.vectors = np.hstack([weather.data, occ.astype(float)])

    def __len__(self) -> int:
        return len(self.vectors)

    def vector(self, step: int) -> np.ndarray:
        return self.vectors[min(step, len(self.vectors) - 1)]

    def window(self, step: int, length: int) -> np.ndarray:
        idx = np.minimum(np.arange(step, step + length), len(self.vectors) - 1)
        return self.vectors[idx]

    def state(self, step: int):
        return env_from_vector(self.vector(step), self.n_zones)

    def occupancy(self, step: int) -> np.ndarray:
        return self.vector(step)[N_ENV:]


@dataclass
class Trace:
    transitions: list = field(default_factory=list)
    rewards: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.transitions)


def rollout_episode(
    controller,
    config: BuildingConfig,
    weather: WeatherSeries,
    schedule: OccupancySchedule,
    seed: int,
    months: float | None = None,
    n_steps: int | None = None,
    comfort: ComfortParams = SUMMER,
    reward_cfg: RewardConfig | None = None,
) -> Trace:
    """Run ``controller`` in closed loop for ``months`` (2976 steps each).

    ``controller`` exposes ``act(step, state) -> Action`` and
    ``observe(transition)``. The seed only perturbs initial zone temperatures.
    """
    if n_steps is None:
        n_steps = len(weather) if months is None else int(round(months * STEPS_PER_MONTH))
    if n_steps > len(weather):
        raise ValueError(f"weather has {len(weather)} steps, episode needs {n_steps}")
    reward_cfg = reward_cfg or RewardConfig.for_building(config)
    exo = Exogenous(weather, schedule)
    sim = BuildingSimulator(config, comfort)
    rng = np.random.default_rng(seed)
    trace = Trace()
    if n_steps == 0:
        return trace
    temps0 = 22.5 + rng.uniform(-1.0, 1.0, config.n_zones)
    state = sim.initial_state(exo.state(0), temps0, rh=0.45)
    for t in range(n_steps):
        try:
            action = controller.act(t, state)
        except Exception as exc:
            raise ControllerError(t, exc) from exc
        nxt, _, _ = sim.step(state, action, exo.state(t + 1))
        tr = Transition(state, action, nxt, t)
        trace.transitions.append(tr)
        trace.rewards.append(reward(nxt.zones, nxt.env.occupancy, reward_cfg))
        try:
            controller.observe(tr)
        except Exception as exc:
            raise ControllerError(t, exc) from exc
        state = nxt
    return trace
