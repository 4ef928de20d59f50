"""Accuracy-weighted ensemble of dynamics models with multi-step rollout."""
from __future__ import annotations

from collections import deque
from pathlib import Path

import numpy as np

from .core import FullState, building_dim

DEFAULT_MEMBERS = 5
DEFAULT_MEMORY = 4  # past real transitions scored per model
DEFAULT_DISCOUNT = 0.9


class RolloutError(RuntimeError):
    pass


def discounted_mse(errors, phi: float) -> float:
    """Sum of phi**age * error, with ``errors`` ordered oldest to newest.

    The newest error has age 1.
    """
    e = np.asarray(errors, dtype=float)
    ages = np.arange(len(e), 0, -1)
    return float(np.sum(phi**ages * e))


def compute_weights(mse) -> np.ndarray:
    """W_i = (1 - Norm(MSE_i)) / sum_j (1 - Norm(MSE_j)), min-max Norm.

    Uniform when all MSEs are equal.
    """
    m = np.asarray(mse, dtype=float)
    if m.ndim != 1 or len(m) < 1:
        raise ValueError("need at least one MSE value")
    lo, hi = m.min(), m.max()
    if not hi > lo:
        return np.full(len(m), 1.0 / len(m))
    score = 1.0 - (m - lo) / (hi - lo)
    return score / score.sum()


class SimulatorModel:
    """The ground-truth simulator exposed as a delta-predicting member."""

    def __init__(self, simulator):
        self.simulator = simulator
        self.n_zones = simulator.config.n_zones

    def delta(self, s, a, e):
        return self.simulator.predict_building(s, a, e) - np.asarray(s, dtype=float)


class Ensemble:
    """M members combined with weights derived from recent real errors.

    Members expose ``delta(s, a, e)`` in physical units. Prediction errors are
    divided by ``error_scale`` (per building-state component) before squaring
    so components are commensurate.
    """

    def __init__(self, models, memory: int = DEFAULT_MEMORY, phi: float = DEFAULT_DISCOUNT, error_scale=None):
        if not models:
            raise ValueError("ensemble needs at least one model")
        self.models = list(models)
        self.n_zones = self.models[0].n_zones
        self.memory = memory
        self.phi = phi
        if error_scale is None:
            error_scale = getattr(self.models[0], "error_scale", None)
        nb = building_dim(self.n_zones)
        self.error_scale = np.ones(nb) if error_scale is None else np.asarray(error_scale, dtype=float)
        self.errors = [deque(maxlen=memory) for _ in self.models]
        self.weights = np.full(len(self.models), 1.0 / len(self.models))

    def __len__(self) -> int:
        return len(self.models)

    def mse(self) -> np.ndarray | None:
        if not self.errors[0]:
            return None
        return np.array([discounted_mse(list(buf), self.phi) for buf in self.errors])

    def record_observation(self, prior: FullState, action, observed: FullState) -> None:
        """Score every member on one real transition and refresh the weights."""
        s = prior.building_vector()
        e = prior.env_vector()
        a = action.to_vector() if hasattr(action, "to_vector") else np.asarray(action, dtype=float)
        target = observed.building_vector()
        for model, buf in zip(self.models, self.errors):
            pred = s + model.delta(s, a, e)
            buf.append(float(np.sum(((pred - target) / self.error_scale) ** 2)))
        m = self.mse()
        self.weights = np.full(len(self.models), 1.0 / len(self.models)) if m is None else compute_weights(m)

    def predict(self, s, a, e, weights=None):
        """Weighted combination of the members' next-state predictions."""
        w = self.weights if weights is None else np.asarray(weights, dtype=float)
        s = np.asarray(s, dtype=float)
        out = np.zeros(np.broadcast_shapes(s.shape, np.shape(a)[:-1] + s.shape[-1:]))
        for wi, model in zip(w, self.models):
            if wi == 0.0:
                continue
            out += wi * (s + model.delta(s, a, e))
        return out

    def rollout(self, s0, actions, forecast):
        """Predicted building states after each of the H actions.

        ``actions`` has shape (..., H, 2N); ``forecast`` (>= H, 7+N) holds the
        ground-truth environment at each decision step. Weights are frozen for
        the whole rollout. Returns shape (..., H, 5N).
        """
        actions = np.asarray(actions, dtype=float)
        forecast = np.asarray(forecast, dtype=float)
        h = actions.shape[-2]
        if len(forecast) < h:
            raise ValueError(f"forecast has {len(forecast)} rows, horizon is {h}")
        w = self.weights.copy()
        s = np.broadcast_to(np.asarray(s0, dtype=float), actions.shape[:-2] + (np.shape(s0)[-1],))
        out = np.empty(actions.shape[:-1] + (s.shape[-1],))
        for t in range(h):
            s = self.predict(s, actions[..., t, :], forecast[t], w)
            if not np.all(np.isfinite(s)):
                raise RolloutError(f"non-finite prediction at rollout step {t}")
            out[..., t, :] = s
        return out

    def save(self, directory, seeds=None) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for i, m in enumerate(self.models):
            m.save(d / f"model_{i}.txt")
        seeds = list(seeds) if seeds is not None else list(range(len(self.models)))
        manifest = [
            f"members = {len(self.models)}",
            f"memory = {self.memory}",
            f"phi = {self.phi!r}",
            "seeds = " + ",".join(str(s) for s in seeds),
        ]
        (d / "manifest.txt").write_text("\n".join(manifest) + "\n")

    @classmethod
    def load(cls, directory) -> "Ensemble":
        from .dynamics import DynamicsModel

        d = Path(directory)
        kv = {}
        for line in (d / "manifest.txt").read_text().splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                kv[k.strip()] = v.strip()
        n = int(kv["members"])
        models = [DynamicsModel.load(d / f"model_{i}.txt") for i in range(n)]
        return cls(models, memory=int(kv["memory"]), phi=float(kv["phi"]))
