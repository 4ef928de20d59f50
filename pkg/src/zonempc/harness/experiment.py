"""Experiment orchestration: collect, train, closed-loop control, comparison."""
from __future__ import annotations

import csv
import dataclasses
import math
from collections import deque
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ..control import PLANNERS, MPCController, PlannerConfig, RewardConfig, RuleBasedController
from ..core import STEPS_PER_MONTH, Dataset, split_train_val
from ..dynamics import DivergenceError, TrainConfig, fit_model
from ..ensemble import Ensemble
from ..simenv import (
    SUMMER,
    WINTER,
    BuildingConfig,
    Exogenous,
    OccupancySchedule,
    load_weather_csv,
    profile_season,
    rollout_episode,
    synthesize_weather,
)
from ..simenv.weather import WeatherSeries
from .io import Results, read_config, read_dataset_csv, write_config, write_dataset_csv, write_loss_curves, write_results_csv
from .metrics import MetricsReport, compute_metrics, savings

CONTROLLERS = ("rule",) + PLANNERS
TRAIN_SEED_OFFSET = 1000  # training data is drawn from a different weather/occupancy stream


@dataclass(frozen=True)
class ExperimentConfig:
    profile: str = "fresno_jul"
    weather_csv: str | None = None
    season: str | None = None  # summer/winter clothing; inferred from the profile when unset
    months: int = 1
    controller: str = "mppi"
    seed: int = 0
    models: int = 5
    window: int = 2 * STEPS_PER_MONTH
    update_period: int = 672  # 0 disables in-situ updates
    samples: int = 1000
    horizon: int = 20
    gamma: float = 0.99
    temperature: float = 1.0
    noise_frac: float = 0.1  # MPPI sigma as a fraction of each action range
    cem_iters: int = 5
    elite_frac: float = 0.1
    epochs: int = 40
    batch_size: int = 512
    learning_rate: float = 1e-3
    ensemble: str | None = None
    data: str | None = None  # transitions that seed the sliding window
    out: str = "out"

    def __post_init__(self):
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        if self.months <= 0:
            raise ValueError("months must be positive")
        if self.models < 1:
            raise ValueError("need at least one model")
        if self.window < self.batch_size:
            raise ValueError("window must hold at least one batch")
        if not 0 <= self.update_period <= self.window:
            raise ValueError("update period must lie in [0, window]")
        if self.season not in (None, "summer", "winter"):
            raise ValueError("season must be summer or winter")
        if self.weather_csv is None and self.profile not in _profiles():
            raise ValueError(f"unknown weather profile {self.profile!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.months * STEPS_PER_MONTH))

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        """Build from string values (config file or CLI), coercing types."""
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for k, v in values.items():
            if v is None:
                continue
            if k not in types:
                raise ValueError(f"unknown config key {k!r}")
            kw[k] = _coerce(v, types[k])
        return cls(**kw)

    def to_mapping(self) -> dict:
        return dataclasses.asdict(self)


def _profiles():
    from ..simenv import PROFILES

    return PROFILES


def _coerce(value, type_name: str):
    if not isinstance(value, str):
        return value
    if value in ("", "none", "None"):
        return None
    base = type_name.replace(" | None", "")
    if base == "int":
        return int(value)
    if base == "float":
        return float(value)
    return value


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    values = read_config(path)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig.from_mapping(values)


def make_weather(cfg: ExperimentConfig) -> WeatherSeries:
    if cfg.weather_csv:
        series = load_weather_csv(cfg.weather_csv)
        if len(series) < cfg.n_steps:
            raise ValueError(f"{cfg.weather_csv} has {len(series)} steps, need {cfg.n_steps}")
        return WeatherSeries(series.data[: cfg.n_steps])
    return synthesize_weather(cfg.profile, cfg.months, cfg.seed)


def make_schedule(cfg: ExperimentConfig, n_zones: int = 5) -> OccupancySchedule:
    return OccupancySchedule(n_zones=n_zones, seed=cfg.seed)


def comfort_for(cfg: ExperimentConfig):
    season = cfg.season or (profile_season(cfg.profile) if cfg.weather_csv is None else "summer")
    return SUMMER if season == "summer" else WINTER


def planner_config(cfg: ExperimentConfig) -> PlannerConfig:
    base = PlannerConfig.for_zones(5)
    return base.with_(
        n_samples=cfg.samples,
        horizon=cfg.horizon,
        gamma=cfg.gamma,
        temperature=cfg.temperature,
        noise_scale=cfg.noise_frac * (base.action_high - base.action_low),
        cem_iters=cfg.cem_iters,
        elite_frac=cfg.elite_frac,
        seed=cfg.seed,
    )


def train_config(cfg: ExperimentConfig, seed: int = 0) -> TrainConfig:
    return TrainConfig(learning_rate=cfg.learning_rate, batch_size=cfg.batch_size, epochs=cfg.epochs, seed=seed)


# -- collect -----------------------------------------------------------------


def collect_dataset(cfg: ExperimentConfig, path=None, building: BuildingConfig | None = None):
    """Roll out the rule-based controller and persist the transitions.

    Returns (path, Dataset).
    """
    building = building or BuildingConfig()
    weather = make_weather(cfg)
    schedule = make_schedule(cfg, building.n_zones)
    trace = rollout_episode(
        RuleBasedController(building.n_zones), building, weather, schedule, cfg.seed,
        n_steps=cfg.n_steps, comfort=comfort_for(cfg),
    )
    ds = Dataset.from_transitions(trace.transitions, building.n_zones)
    path = Path(path) if path is not None else Path(cfg.out) / "dataset.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(ds, path)
    return path, ds


# -- train -------------------------------------------------------------------


def member_seeds(seed: int, models: int) -> list[int]:
    """Distinct, reproducible (init, shuffle) seed pairs for each member."""
    state = np.random.SeedSequence(seed).generate_state(2 * models, dtype=np.uint32)
    return [(int(state[2 * i]), int(state[2 * i + 1])) for i in range(models)]


def train_ensemble(dataset: Dataset, models: int, seed: int, cfg: TrainConfig, val_ratio: float = 0.8):
    """Train ``models`` members from scratch; returns (Ensemble, histories, seeds)."""
    if len(dataset) < cfg.batch_size:
        raise ValueError(f"dataset has {len(dataset)} rows, fewer than one batch ({cfg.batch_size})")
    train_set, val_set = split_train_val(dataset, val_ratio, seed)
    members, histories = [], []
    seeds = member_seeds(seed, models)
    for i, (init_seed, shuffle_seed) in enumerate(seeds):
        try:
            model, hist = fit_model(train_set, dataclasses.replace(cfg, seed=shuffle_seed), init_seed, val=val_set)
        except DivergenceError as exc:
            raise DivergenceError(f"model {i}: {exc}") from exc
        members.append(model)
        histories.append(hist)
    return Ensemble(members), histories, [s for s, _ in seeds]


def train_pipeline(dataset, models: int = 5, seed: int = 0, cfg: TrainConfig = TrainConfig(), out_dir="ensemble"):
    """Train an ensemble and write its directory (members, manifest, loss curves).

    ``dataset`` is a Dataset or a dataset CSV path. Returns (Ensemble, histories).
    """
    if not isinstance(dataset, Dataset):
        dataset = read_dataset_csv(dataset)
    ens, histories, seeds = train_ensemble(dataset, models, seed, cfg)
    out = Path(out_dir)
    ens.save(out, seeds)
    write_loss_curves(histories, out / "loss_curves.csv")
    return ens, histories


# -- control -----------------------------------------------------------------


class InSituController:
    """Wraps an MPC controller with periodic from-scratch retraining.

    Real transitions enter a bounded sliding window (oldest evicted first);
    every ``period`` steps all members are retrained on the window.
    """

    def __init__(self, inner: MPCController, window: int, period: int, models: int, seed: int,
                 train_cfg: TrainConfig, initial: Dataset | None = None):
        self.inner = inner
        self.period = period
        self.models = models
        self.seed = seed
        self.train_cfg = train_cfg
        self.window = deque(maxlen=window)
        self.n_zones = inner.n_zones
        if initial is not None:
            for k in range(len(initial)):
                self.window.append((initial.states[k], initial.actions[k], initial.next_states[k], initial.steps[k]))
        self.updates: list[int] = []

    def window_dataset(self) -> Dataset:
        s, a, ns, k = (np.array(c) for c in zip(*self.window))
        return Dataset(self.n_zones, s, a, ns, k.astype(int))

    def due(self, step: int) -> bool:
        return self.period > 0 and step > 0 and step % self.period == 0

    def act(self, step, state):
        if self.due(step) and len(self.window) >= self.train_cfg.batch_size:
            ens, _, _ = train_ensemble(self.window_dataset(), self.models, self.seed + len(self.updates) + 1, self.train_cfg)
            self.inner.model = ens
            self.updates.append(step)
        return self.inner.act(step, state)

    def observe(self, transition):
        from ..core import flatten

        self.window.append((
            flatten(transition.state), transition.action.to_vector(),
            flatten(transition.next_state), transition.timestep_index,
        ))
        self.inner.observe(transition)


def build_controller(cfg: ExperimentConfig, ensemble, exogenous, building: BuildingConfig):
    if cfg.controller == "rule":
        return RuleBasedController(building.n_zones)
    if ensemble is None:
        raise ValueError(f"controller {cfg.controller!r} needs a trained ensemble")
    if not isinstance(ensemble, Ensemble):
        ensemble = Ensemble.load(ensemble)
    ctl = MPCController(cfg.controller, ensemble, exogenous, planner_config(cfg), RewardConfig.for_building(building))
    if cfg.update_period > 0:
        initial = read_dataset_csv(cfg.data) if cfg.data else None
        ctl = InSituController(ctl, cfg.window, cfg.update_period, cfg.models, cfg.seed,
                               train_config(cfg, cfg.seed), initial)
    return ctl


@dataclass
class RunOutcome:
    results_path: Path
    results: Results
    metrics: MetricsReport
    updates: list


def run_control_experiment(cfg: ExperimentConfig, ensemble=None, building: BuildingConfig | None = None) -> RunOutcome:
    """Closed-loop episode; writes results.csv, metrics.txt and run.cfg under ``cfg.out``."""
    building = building or BuildingConfig()
    weather = make_weather(cfg)
    schedule = make_schedule(cfg, building.n_zones)
    exo = Exogenous(weather, schedule)
    ensemble = ensemble if ensemble is not None else cfg.ensemble
    ctl = build_controller(cfg, ensemble, exo, building)
    trace = rollout_episode(ctl, building, weather, schedule, cfg.seed, n_steps=cfg.n_steps,
                            comfort=comfort_for(cfg), reward_cfg=RewardConfig.for_building(building))
    results = Results.from_trace(trace)
    metrics = compute_metrics(results, schedule)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "results.csv"
    write_results_csv(results, path)
    (out / "metrics.txt").write_text("\n".join(metrics.to_lines()) + "\n")
    write_config(cfg.to_mapping(), out / "run.cfg")
    return RunOutcome(path, results, metrics, list(getattr(ctl, "updates", [])))


def evaluate_results(results_path, cfg: ExperimentConfig | None = None) -> MetricsReport:
    """Metrics for a results CSV; occupancy is rebuilt from the run's config."""
    from .io import read_results_csv

    results_path = Path(results_path)
    if cfg is None:
        run_cfg = results_path.parent / "run.cfg"
        cfg = load_config(run_cfg) if run_cfg.exists() else ExperimentConfig()
    results = read_results_csv(results_path)
    return compute_metrics(results, make_schedule(cfg, results.n_zones))


# -- compare -----------------------------------------------------------------

COMPARE_COLUMNS = ("kind", "label", "controller", "total_kwh", "heat_kwh", "cool_kwh",
                   "violation_rate", "pmv_mean", "pmv_std", "reward", "energy_savings_pct")
_NUMERIC = ("total_kwh", "heat_kwh", "cool_kwh", "violation_rate", "pmv_mean", "pmv_std", "reward")
_SHARED = ("profile", "weather_csv", "season", "months", "seed")


def _row(kind, label, controller, m: MetricsReport | None = None, values: dict | None = None):
    if m is not None:
        values = {"total_kwh": m.total_kwh, "heat_kwh": m.heat_kwh, "cool_kwh": m.cool_kwh,
                  "violation_rate": m.violation_rate, "pmv_mean": m.pmv_mean, "pmv_std": m.pmv_std,
                  "reward": m.total_reward}
    return {"kind": kind, "label": label, "controller": controller, **values}


def _pct(base: float, cand: float) -> float:
    if base == cand:
        return 0.0
    return 100.0 * (cand - base) / abs(base) if base != 0 else float("nan")


def compare(configs, out_path, ensemble=None, labels=None):
    """Run every config on the same weather/occupancy and tabulate.

    Emits one data row per config and one delta row per non-baseline config
    (percentage change of each metric vs the first config, plus energy savings).
    Returns (rows, outcomes).
    """
    configs = list(configs)
    if len(configs) < 2:
        raise ValueError("compare needs at least two configs")
    ref = configs[0]
    for c in configs[1:]:
        if any(getattr(c, k) != getattr(ref, k) for k in _SHARED):
            raise ValueError("compared configs must share weather, months and seed")
    labels = list(labels) if labels else [f"{i}_{c.controller}" for i, c in enumerate(configs)]
    outcomes = [run_control_experiment(c, ensemble) for c in configs]
    rows = [_row("data", lab, c.controller, o.metrics) for lab, c, o in zip(labels, configs, outcomes)]
    base = rows[0]
    for lab, c, o, r in zip(labels[1:], configs[1:], outcomes[1:], rows[1:]):
        delta = {k: _pct(base[k], r[k]) for k in _NUMERIC}
        delta["energy_savings_pct"] = 100.0 * savings(base["total_kwh"], r["total_kwh"])
        rows.append(_row("delta_pct", f"{lab}_vs_{labels[0]}", c.controller, values=delta))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARE_COLUMNS)
        for r in rows:
            w.writerow([_cell(r.get(k, "")) for k in COMPARE_COLUMNS])
    return rows, outcomes


def _cell(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return v


def prepare_ensemble(cfg: ExperimentConfig, train_months: int = 2, train_seed: int | None = None):
    """Collect rule-based data on a separate stream and train an ensemble.

    Writes ``<out>/train/dataset.csv`` and ``<out>/ensemble``. Returns
    (ensemble directory, dataset path).
    """
    tseed = cfg.seed + TRAIN_SEED_OFFSET if train_seed is None else train_seed
    tcfg = cfg.replace(months=train_months, seed=tseed, weather_csv=None)
    data_path, ds = collect_dataset(tcfg, Path(cfg.out) / "train" / "dataset.csv")
    ens_dir = Path(cfg.out) / "ensemble"
    train_pipeline(ds, cfg.models, tseed, train_config(cfg), ens_dir)
    return ens_dir, data_path


def compare_from_file(path, out_path=None):
    """Compare controllers listed in a config file.

    Besides the ExperimentConfig keys the file takes ``controllers`` (comma
    list), optional ``labels``, ``train_months`` and ``train_seed``. When a
    model-based controller is listed and no ``ensemble`` is given, one is
    trained on rule-based data from a separate seed first.
    """
    values = read_config(path)
    controllers = [c.strip() for c in values.pop("controllers", "rule,mppi").split(",") if c.strip()]
    labels = values.pop("labels", None)
    labels = [s.strip() for s in labels.split(",")] if labels else None
    train_months = int(values.pop("train_months", 2))
    train_seed = values.pop("train_seed", None)
    train_seed = int(train_seed) if train_seed is not None else None
    base = ExperimentConfig.from_mapping(values)
    ensemble = base.ensemble
    if ensemble is None and any(c != "rule" for c in controllers):
        ensemble, data_path = prepare_ensemble(base, train_months, train_seed)
        if base.data is None:
            base = base.replace(data=str(data_path))
    configs = [base.replace(controller=c, out=str(Path(base.out) / f"{i}_{c}"), ensemble=None)
               for i, c in enumerate(controllers)]
    ens = Ensemble.load(ensemble) if ensemble is not None else None
    rows, outcomes = compare(configs, out_path or Path(base.out) / "comparison.csv", ens, labels)
    return rows, outcomes
