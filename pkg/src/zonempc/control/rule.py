"""Schedule-driven rule-based setpoint policy used as the baseline controller."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import COOL_SP_BOUNDS, HEAT_SP_BOUNDS, STEPS_PER_DAY, Action, f_to_c

WARMUP_HEAT_F = 70.0
WARMUP_COOL_F = 74.0
SETBACK_HEAT_F = 65.0
SETBACK_COOL_F = 80.0
WARMUP_HOURS = 1.0  # first hour of the occupied window

# per-zone occupied setpoints, degF, cycled when there are more zones
ZONE_HEAT_F = (70.0, 69.0, 70.0, 69.0, 70.0)
ZONE_COOL_F = (74.0, 75.0, 74.0, 75.0, 74.0)


@dataclass(frozen=True)
class RuleSchedule:
    """HVAC occupied window: weekdays [start_hour, end_hour)."""

    start_hour: float = 7.0
    end_hour: float = 19.0

    def mode(self, step: int) -> str:
        day, k = divmod(int(step), STEPS_PER_DAY)
        hour = k / 4.0
        if day % 7 >= 5 or not (self.start_hour <= hour < self.end_hour):
            return "setback"
        if hour < self.start_hour + WARMUP_HOURS:
            return "warmup"
        return "occupied"


def _clamp_pair(heat_f, cool_f):
    h = float(np.clip(f_to_c(heat_f), *HEAT_SP_BOUNDS))
    c = float(np.clip(f_to_c(cool_f), *COOL_SP_BOUNDS))
    return h, max(h, c)


def rule_based_policy(step: int, n_zones: int, schedule: RuleSchedule = RuleSchedule()) -> Action:
    """Setpoints for ``step`` (15-minute index, step 0 = Monday 00:00)."""
    mode = schedule.mode(step)
    pairs = []
    for i in range(n_zones):
        if mode == "warmup":
            pairs.append(_clamp_pair(WARMUP_HEAT_F, WARMUP_COOL_F))
        elif mode == "occupied":
            pairs.append(_clamp_pair(ZONE_HEAT_F[i % len(ZONE_HEAT_F)], ZONE_COOL_F[i % len(ZONE_COOL_F)]))
        else:
            pairs.append(_clamp_pair(SETBACK_HEAT_F, SETBACK_COOL_F))
    return Action(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


class RuleBasedController:
    def __init__(self, n_zones: int, schedule: RuleSchedule = RuleSchedule()):
        self.n_zones = n_zones
        self.schedule = schedule

    def act(self, step, state):
        return rule_based_policy(step, self.n_zones, self.schedule)

    def observe(self, transition):
        pass
