"""Energy and comfort summaries of a closed-loop run."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..core import STEPS_PER_MONTH
from .io import Results

COMFORT_LIMIT = 0.7


@dataclass(frozen=True)
class MetricsReport:
    heat_kwh: float
    cool_kwh: float
    zone_heat_kwh: tuple
    zone_cool_kwh: tuple
    pmv_mean: float
    pmv_std: float
    violation_rate: float
    episode_rewards: tuple
    n_steps: int
    occupied_zone_steps: int

    def __post_init__(self):
        if not 0.0 <= self.violation_rate <= 1.0:
            raise ValueError("violation rate must lie in [0, 1]")
        if self.heat_kwh < 0 or self.cool_kwh < 0:
            raise ValueError("energies must be non-negative")

    @property
    def total_kwh(self) -> float:
        return self.heat_kwh + self.cool_kwh

    @property
    def total_reward(self) -> float:
        return float(sum(self.episode_rewards))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["total_kwh"] = self.total_kwh
        d["total_reward"] = self.total_reward
        return d

    def to_lines(self) -> list[str]:
        out = []
        for k, v in self.as_dict().items():
            if isinstance(v, tuple):
                v = ",".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            out.append(f"{k} = {v}")
        return out


def occupancy_for(results: Results, schedule) -> np.ndarray:
    """Occupancy seen by each result row (the step after the action)."""
    flags = schedule.flags_array(int(results.step.max()) + 2) if len(results) else np.zeros((0, results.n_zones))
    return np.asarray(flags, dtype=bool)[results.step + 1]


def compute_metrics(results: Results, schedule=None, occupancy=None) -> MetricsReport:
    """Summarize ``results``; comfort statistics use occupied zone-steps only.

    Pass either an occupancy schedule or an explicit (T, N) occupancy array
    aligned with the result rows.
    """
    if len(results) == 0:
        raise ValueError("results are empty")
    if occupancy is None:
        if schedule is None:
            raise ValueError("need a schedule or an occupancy array")
        occupancy = occupancy_for(results, schedule)
    occ = np.asarray(occupancy, dtype=bool)
    if occ.shape != results.pmv.shape:
        raise ValueError(f"occupancy shape {occ.shape} does not match results {results.pmv.shape}")
    pmv = results.pmv[occ]
    if pmv.size:
        mean, std = float(pmv.mean()), float(pmv.std())
        viol = float(np.mean(np.abs(pmv) > COMFORT_LIMIT))
    else:
        mean = std = float("nan")
        viol = 0.0
    episode = results.step // STEPS_PER_MONTH
    rewards = tuple(float(results.reward[episode == k].sum()) for k in np.unique(episode))
    return MetricsReport(
        heat_kwh=float(results.heat_kwh.sum()),
        cool_kwh=float(results.cool_kwh.sum()),
        zone_heat_kwh=tuple(float(x) for x in results.heat_kwh.sum(axis=0)),
        zone_cool_kwh=tuple(float(x) for x in results.cool_kwh.sum(axis=0)),
        pmv_mean=mean,
        pmv_std=std,
        violation_rate=viol,
        episode_rewards=rewards,
        n_steps=len(results),
        occupied_zone_steps=int(occ.sum()),
    )


def savings(baseline_kwh: float, candidate_kwh: float) -> float:
    """Fractional energy saved relative to the baseline."""
    if baseline_kwh <= 0:
        return 0.0 if candidate_kwh == baseline_kwh else float("nan")
    return (baseline_kwh - candidate_kwh) / baseline_kwh
