"""Weather series: seeded synthesis for four climate profiles and CSV ingestion."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core import ENV_FIELDS, STEPS_PER_DAY, STEPS_PER_MONTH

CSV_COLUMNS = (
    "step",
    "t_out_c",
    "rh_out",
    "diffuse_wm2",
    "direct_wm2",
    "incident_deg",
    "wind_ms",
    "wind_dir_deg",
)


class WeatherFormatError(ValueError):
    pass


class WeatherSchemaError(WeatherFormatError):
    pass


class WeatherOrderError(WeatherFormatError):
    pass


@dataclass(frozen=True)
class WeatherSeries:
    """Exogenous outdoor conditions at uniform 15-minute spacing.

    ``data`` has shape (T, 7) with columns in core.ENV_FIELDS order.
    """

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[1] != len(ENV_FIELDS):
            raise ValueError("weather data must have shape (T, 7)")
        if np.any(self.data[:, 2:4] < 0):
            raise ValueError("solar radiation must be non-negative")

    def __len__(self) -> int:
        return len(self.data)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, ENV_FIELDS.index(name)]


@dataclass(frozen=True)
class ClimateProfile:
    t_min: float
    t_max: float
    daily_swing: float  # mean diurnal range, degC
    rh_mean: float
    solar_peak: float  # clear-sky global horizontal, W/m^2
    sunrise: float
    sunset: float
    wind_mean: float
    season: str  # "summer" or "winter"; selects clothing level


PROFILES = {
    "fresno_jul": ClimateProfile(15.0, 42.0, 18.0, 0.30, 950.0, 5.75, 20.25, 3.0, "summer"),
    "fresno_jan": ClimateProfile(-1.0, 18.0, 10.0, 0.75, 500.0, 7.25, 17.0, 2.0, "winter"),
    "chicago_jan": ClimateProfile(-20.0, 15.0, 8.0, 0.70, 400.0, 7.25, 16.75, 5.0, "winter"),
    "chicago_jul": ClimateProfile(15.0, 40.0, 11.0, 0.65, 900.0, 5.25, 20.5, 4.0, "summer"),
}


def profile_season(profile: str) -> str:
    try:
        return PROFILES[profile].season
    except KeyError:
        raise ValueError(f"unknown weather profile {profile!r}; choose from {sorted(PROFILES)}") from None


def synthesize_weather(profile: str, months: int, seed: int) -> WeatherSeries:
    """Daily temperature sinusoid plus seeded noise, clipped to the profile range.

    Solar radiation follows a half-sinusoid between sunrise and sunset scaled
    by a per-day clearness factor.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown weather profile {profile!r}; choose from {sorted(PROFILES)}")
    if months < 1:
        raise ValueError("months must be >= 1")
    p = PROFILES[profile]
    rng = np.random.default_rng(seed)
    n = months * STEPS_PER_MONTH
    n_days = n // STEPS_PER_DAY
    hour = (np.arange(n) % STEPS_PER_DAY) / 4.0
    day = np.arange(n) // STEPS_PER_DAY

    # day-to-day mean follows an AR(1) walk around the range centre
    centre = 0.5 * (p.t_min + p.t_max)
    room = 0.5 * (p.t_max - p.t_min) - 0.5 * p.daily_swing
    dev = np.zeros(n_days)
    for d in range(1, n_days):
        dev[d] = 0.8 * dev[d - 1] + rng.normal(0.0, 0.35 * room)
    daily_mean = centre + np.clip(dev, -room, room)
    swing = p.daily_swing * rng.uniform(0.8, 1.1, n_days)
    # minimum near 05:00, maximum near 15:00
    diurnal = -np.cos(2 * np.pi * (hour - 3.0) / 24.0) * 0.5 * swing[day]
    temp = daily_mean[day] + diurnal + rng.normal(0.0, 0.3, n)
    temp = np.clip(temp, p.t_min, p.t_max)

    rh = p.rh_mean - 0.015 * (temp - daily_mean[day]) + rng.normal(0.0, 0.03, n)
    rh = np.clip(rh, 0.05, 1.0)

    clear = rng.uniform(0.55, 1.0, n_days)
    frac = (hour - p.sunrise) / (p.sunset - p.sunrise)
    up = (frac > 0) & (frac < 1)
    elev = np.where(up, np.sin(np.pi * np.clip(frac, 0, 1)), 0.0)
    glob = p.solar_peak * elev * clear[day]
    diffuse = glob * (0.15 + 0.35 * (1 - clear[day]))
    direct = glob - diffuse
    incident = np.where(up, 90.0 - 70.0 * elev, 90.0)

    wind = np.clip(p.wind_mean * rng.gamma(4.0, 0.25, n_days)[day] + rng.normal(0, 0.4, n), 0.0, None)
    wind_dir = np.mod(np.cumsum(rng.normal(0.0, 8.0, n)) + rng.uniform(0, 360), 360.0)

    data = np.column_stack([temp, rh, diffuse, direct, incident, wind, wind_dir])
    return WeatherSeries(data)


def write_weather_csv(series: WeatherSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i, row in enumerate(series.data):
            w.writerow([i] + [repr(float(v)) for v in row])


def load_weather_csv(path) -> WeatherSeries:
    """Read and validate a weather CSV (one row per 15-minute step)."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise WeatherSchemaError(f"{path}: empty file, header required") from None
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise WeatherSchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in CSV_COLUMNS]
        rows = []
        prev = None
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(not f.strip() for f in raw):
                continue
            try:
                vals = [float(raw[i]) for i in idx]
            except (ValueError, IndexError) as exc:
                raise WeatherFormatError(f"{path}: line {lineno}: cannot parse row ({exc})") from None
            step = vals[0]
            if step != int(step):
                raise WeatherFormatError(f"{path}: line {lineno}: step must be an integer")
            if prev is not None:
                if step <= prev:
                    raise WeatherOrderError(f"{path}: line {lineno}: step {int(step)} not after {int(prev)}")
                if step != prev + 1:
                    raise WeatherOrderError(f"{path}: line {lineno}: gap between steps {int(prev)} and {int(step)}")
            if vals[3] < 0 or vals[4] < 0:
                raise WeatherSchemaError(f"{path}: line {lineno}: negative solar radiation")
            if not 0.0 <= vals[2] <= 1.0:
                raise WeatherSchemaError(f"{path}: line {lineno}: rh_out must be a fraction in [0, 1]")
            prev = step
            rows.append(vals[1:])
    if not rows:
        raise WeatherSchemaError(f"{path}: no data rows")
    return WeatherSeries(np.array(rows, dtype=float))
