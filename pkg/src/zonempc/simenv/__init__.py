from .building import BuildingConfig, BuildingSimulator, SimulationError, thermal_step
from .comfort import SUMMER, WINTER, ComfortParams, PMVConvergenceError, compute_pmv
from .episode import ControllerError, Exogenous, Trace, rollout_episode
from .occupancy import OccupancySchedule
from .weather import (
    PROFILES,
    WeatherFormatError,
    WeatherOrderError,
    WeatherSchemaError,
    WeatherSeries,
    load_weather_csv,
    profile_season,
    synthesize_weather,
    write_weather_csv,
)

__all__ = [
    "BuildingConfig", "BuildingSimulator", "SimulationError", "thermal_step",
    "SUMMER", "WINTER", "ComfortParams", "PMVConvergenceError", "compute_pmv",
    "ControllerError", "Exogenous", "Trace", "rollout_episode", "OccupancySchedule",
    "PROFILES", "WeatherFormatError", "WeatherOrderError", "WeatherSchemaError",
    "WeatherSeries", "load_weather_csv", "profile_season", "synthesize_weather",
    "write_weather_csv",
]
