"""Weekly office occupancy with occasional seeded night work."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import STEPS_PER_DAY


@dataclass(frozen=True)
class OccupancySchedule:
    """Per-zone weekday occupancy plus random evening sessions.

    Step 0 is Monday 00:00. Weekday hours are [start, end) with a small
    per-zone stagger. On any evening (weekends included) each zone is
    independently occupied with probability ``night_prob`` for a 1-4 hour
    session starting between 19:00 and 22:00.
    """

    n_zones: int = 5
    seed: int = 0
    start_hour: float = 8.0
    end_hour: float = 18.0
    night_prob: float = 0.15

    def __post_init__(self):
        if not 0.0 <= self.night_prob <= 1.0:
            raise ValueError("night_prob must be a probability")

    def zone_hours(self, zone: int) -> tuple[float, float]:
        shift = 0.5 * (zone % 3) - 0.5
        return self.start_hour + shift, self.end_hour + shift

    def _night_sessions(self, day: int) -> list[tuple[int, int] | None]:
        rng = np.random.default_rng([self.seed, day])
        out = []
        for _ in range(self.n_zones):
            draw, start, length = rng.random(), rng.integers(19 * 4, 22 * 4 + 1), rng.integers(4, 17)
            out.append((int(start), int(start + length)) if draw < self.night_prob else None)
        return out

    def flags_array(self, n_steps: int, start_step: int = 0) -> np.ndarray:
        steps = np.arange(start_step, start_step + n_steps)
        day = steps // STEPS_PER_DAY
        minute_step = steps % STEPS_PER_DAY
        weekday = (day % 7) < 5
        out = np.zeros((n_steps, self.n_zones), dtype=int)
        for z in range(self.n_zones):
            h0, h1 = self.zone_hours(z)
            out[:, z] = weekday & (minute_step >= h0 * 4) & (minute_step < h1 * 4)
        for d in np.unique(day):
            sessions = self._night_sessions(int(d))
            sel = day == d
            for z, sess in enumerate(sessions):
                if sess is not None:
                    m = sel & (minute_step >= sess[0]) & (minute_step < sess[1])
                    out[m, z] = 1
        return out

    def flags(self, step: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.flags_array(1, step)[0])
