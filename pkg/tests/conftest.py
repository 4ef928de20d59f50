import numpy as np
import pytest

from zonempc.core import Dataset
from zonempc.simenv import BuildingConfig, OccupancySchedule, rollout_episode, synthesize_weather
from zonempc.control import RuleBasedController


@pytest.fixture(scope="session")
def building():
    return BuildingConfig()


@pytest.fixture(scope="session")
def rule_trace(building):
    weather = synthesize_weather("fresno_jul", 1, seed=11)
    return rollout_episode(RuleBasedController(5), building, weather, OccupancySchedule(seed=11), seed=11, n_steps=600)


@pytest.fixture(scope="session")
def small_dataset(rule_trace):
    return Dataset.from_transitions(rule_trace.transitions, 5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
