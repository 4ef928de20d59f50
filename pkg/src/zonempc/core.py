"""Shared domain types, state flattening, normalization and dataset utilities.

Flattening order (frozen; serialized models record a hash of it):

    zone 0: temp_in, rh_in, pmv, heat_energy, cool_energy
    zone 1: ...
    env:    temp_out, rh_out, diffuse_solar, direct_solar, incident_angle,
            wind_speed, wind_dir
    occupancy flag of zone 0..N-1

The first 5N entries form the building state, the remaining 7+N the
environment state. Actions flatten zone-major as (heat_sp, cool_sp) pairs.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

ZONE_FIELDS = ("temp_in", "rh_in", "pmv", "heat_energy", "cool_energy")
ENV_FIELDS = (
    "temp_out",
    "rh_out",
    "diffuse_solar",
    "direct_solar",
    "incident_angle",
    "wind_speed",
    "wind_dir",
)
ACTION_FIELDS = ("heat_sp", "cool_sp")

N_ZONE = len(ZONE_FIELDS)
N_ENV = len(ENV_FIELDS)

STEPS_PER_HOUR = 4
STEPS_PER_DAY = 96
STEPS_PER_MONTH = 2976  # 31 days of 15-minute steps


def f_to_c(deg_f: float) -> float:
    return (deg_f - 32.0) * 5.0 / 9.0


HEAT_SP_BOUNDS = (f_to_c(65.0), f_to_c(72.0))
COOL_SP_BOUNDS = (f_to_c(72.0), f_to_c(80.0))


def building_dim(n_zones: int) -> int:
    return N_ZONE * n_zones


def env_dim(n_zones: int) -> int:
    return N_ENV + n_zones


def state_dim(n_zones: int) -> int:
    return building_dim(n_zones) + env_dim(n_zones)


def action_dim(n_zones: int) -> int:
    return 2 * n_zones


def state_labels(n_zones: int) -> list[str]:
    labels = [f"zone{i}_{f}" for i in range(n_zones) for f in ZONE_FIELDS]
    labels += list(ENV_FIELDS)
    labels += [f"zone{i}_occupancy" for i in range(n_zones)]
    return labels


def action_labels(n_zones: int) -> list[str]:
    return [f"zone{i}_{f}" for i in range(n_zones) for f in ACTION_FIELDS]


def layout_hash(n_zones: int) -> str:
    """Short digest of the flattening order, stored in model files."""
    text = ",".join(state_labels(n_zones) + action_labels(n_zones))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ZoneBuildingState:
    temp_in: float
    rh_in: float
    pmv: float
    heat_energy: float = 0.0
    cool_energy: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.rh_in <= 1.0:
            raise ValueError(f"rh_in must be in [0, 1], got {self.rh_in}")
        if self.heat_energy < 0 or self.cool_energy < 0:
            raise ValueError("zone energies must be non-negative")
        if not math.isfinite(self.pmv):
            raise ValueError("pmv must be finite")


@dataclass(frozen=True)
class EnvironmentState:
    temp_out: float
    rh_out: float
    diffuse_solar: float
    direct_solar: float
    incident_angle: float
    wind_speed: float
    wind_dir: float
    occupancy: tuple[int, ...]

    def __post_init__(self):
        if self.diffuse_solar < 0 or self.direct_solar < 0:
            raise ValueError("solar radiation must be non-negative")
        if any(o not in (0, 1) for o in self.occupancy):
            raise ValueError("occupancy flags must be 0 or 1")


@dataclass(frozen=True)
class Action:
    heat_sp: tuple[float, ...]
    cool_sp: tuple[float, ...]

    def __post_init__(self):
        if len(self.heat_sp) != len(self.cool_sp):
            raise ValueError("heat_sp and cool_sp must have one entry per zone")

    @property
    def n_zones(self) -> int:
        return len(self.heat_sp)

    def to_vector(self) -> np.ndarray:
        return np.column_stack([self.heat_sp, self.cool_sp]).reshape(-1).astype(float)

    @classmethod
    def from_vector(cls, vec) -> "Action":
        v = np.asarray(vec, dtype=float).reshape(-1, 2)
        return cls(tuple(float(x) for x in v[:, 0]), tuple(float(x) for x in v[:, 1]))

    def within_bounds(self, tol: float = 1e-9) -> bool:
        h = np.asarray(self.heat_sp)
        c = np.asarray(self.cool_sp)
        return bool(
            np.all(h >= HEAT_SP_BOUNDS[0] - tol)
            and np.all(h <= HEAT_SP_BOUNDS[1] + tol)
            and np.all(c >= COOL_SP_BOUNDS[0] - tol)
            and np.all(c <= COOL_SP_BOUNDS[1] + tol)
            and np.all(h <= c + tol)
        )


@dataclass(frozen=True)
class FullState:
    zones: tuple[ZoneBuildingState, ...]
    env: EnvironmentState

    def __post_init__(self):
        if len(self.env.occupancy) != len(self.zones):
            raise ValueError("need exactly one occupancy flag per zone")

    @property
    def n_zones(self) -> int:
        return len(self.zones)

    def building_vector(self) -> np.ndarray:
        return flatten(self)[: building_dim(self.n_zones)]

    def env_vector(self) -> np.ndarray:
        return flatten(self)[building_dim(self.n_zones):]


@dataclass(frozen=True)
class Transition:
    state: FullState
    action: Action
    next_state: FullState
    timestep_index: int


def flatten(state: FullState) -> np.ndarray:
    values = [getattr(z, f) for z in state.zones for f in ZONE_FIELDS]
    values += [getattr(state.env, f) for f in ENV_FIELDS]
    values += list(state.env.occupancy)
    return np.array(values, dtype=float)


def unflatten(vec, n_zones: int) -> FullState:
    v = np.asarray(vec, dtype=float)
    if v.shape != (state_dim(n_zones),):
        raise ValueError(f"expected vector of length {state_dim(n_zones)}, got {v.shape}")
    nb = building_dim(n_zones)
    zones = tuple(
        ZoneBuildingState(*(float(x) for x in v[N_ZONE * i : N_ZONE * (i + 1)]))
        for i in range(n_zones)
    )
    env = EnvironmentState(
        *(float(x) for x in v[nb : nb + N_ENV]),
        occupancy=tuple(int(round(x)) for x in v[nb + N_ENV :]),
    )
    return FullState(zones, env)


def env_from_vector(vec, n_zones: int) -> EnvironmentState:
    v = np.asarray(vec, dtype=float)
    return EnvironmentState(
        *(float(x) for x in v[:N_ENV]),
        occupancy=tuple(int(round(x)) for x in v[N_ENV : N_ENV + n_zones]),
    )


def env_to_vector(env: EnvironmentState) -> np.ndarray:
    return np.array([getattr(env, f) for f in ENV_FIELDS] + list(env.occupancy), dtype=float)


@dataclass(frozen=True)
class NormStats:
    """Per-feature mean and standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if self.mean.shape != self.std.shape:
            raise ValueError("mean and std shapes differ")
        if np.any(self.std <= 0):
            raise ValueError("std entries must be positive")

    @classmethod
    def fit(cls, x) -> "NormStats":
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or len(x) == 0:
            raise ValueError("fit needs a non-empty 2-D array")
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        # constant features (e.g. occupancy in an always-occupied window)
        std = np.where(std > 1e-12, std, 1.0)
        return cls(mean, std)


def _check_dim(x: np.ndarray, stats: NormStats):
    if x.shape[-1] != stats.mean.shape[0]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {stats.mean.shape[0]}")


def standardize(x, stats: NormStats) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _check_dim(x, stats)
    return (x - stats.mean) / stats.std


def destandardize(x, stats: NormStats) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _check_dim(x, stats)
    return x * stats.std + stats.mean


@dataclass(frozen=True)
class MinMaxBounds:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError(f"invalid bounds: max {self.hi} must exceed min {self.lo}")


def minmax_norm(x, bounds: MinMaxBounds):
    """Scale into [0, 1]; values outside the bounds are clipped."""
    return np.clip((np.asarray(x, dtype=float) - bounds.lo) / (bounds.hi - bounds.lo), 0.0, 1.0)


@dataclass
class Dataset:
    """Transitions stored as flat arrays (one row per transition)."""

    n_zones: int
    states: np.ndarray
    actions: np.ndarray
    next_states: np.ndarray
    steps: np.ndarray

    def __post_init__(self):
        n = len(self.states)
        if not (len(self.actions) == len(self.next_states) == len(self.steps) == n):
            raise ValueError("dataset arrays have inconsistent lengths")

    def __len__(self) -> int:
        return len(self.states)

    @classmethod
    def from_transitions(cls, transitions: Sequence[Transition], n_zones: int) -> "Dataset":
        if not transitions:
            sd, ad = state_dim(n_zones), action_dim(n_zones)
            return cls(n_zones, np.zeros((0, sd)), np.zeros((0, ad)), np.zeros((0, sd)), np.zeros(0, int))
        return cls(
            n_zones,
            np.stack([flatten(t.state) for t in transitions]),
            np.stack([t.action.to_vector() for t in transitions]),
            np.stack([flatten(t.next_state) for t in transitions]),
            np.array([t.timestep_index for t in transitions], dtype=int),
        )

    def subset(self, idx) -> "Dataset":
        return Dataset(self.n_zones, self.states[idx], self.actions[idx], self.next_states[idx], self.steps[idx])

    def concat(self, other: "Dataset") -> "Dataset":
        return Dataset(
            self.n_zones,
            np.concatenate([self.states, other.states]),
            np.concatenate([self.actions, other.actions]),
            np.concatenate([self.next_states, other.next_states]),
            np.concatenate([self.steps, other.steps]),
        )

    def model_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Network inputs [s, a, e] and delta targets s' - s in raw units."""
        nb = building_dim(self.n_zones)
        x = np.hstack([self.states[:, :nb], self.actions, self.states[:, nb:]])
        y = self.next_states[:, :nb] - self.states[:, :nb]
        return x, y


def split_train_val(dataset: Dataset, ratio: float = 0.8, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffle followed by a ratio split into disjoint train/val parts."""
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(ratio * n))
    return dataset.subset(np.sort(perm[:n_train])), dataset.subset(np.sort(perm[n_train:]))
