"""Environment-conditioned MLP dynamics model, trained with backprop and Adam.

The network maps standardized [s, a, e] to a standardized building-state
delta; ``DynamicsModel`` wraps the parameters with their normalization so
that callers work in physical units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import NormStats, building_dim, env_dim, action_dim, layout_hash

FORMAT_VERSION = 1
HIDDEN = (200, 200)


class DivergenceError(RuntimeError):
    pass


@dataclass
class MlpParams:
    weights: list
    biases: list

    @property
    def dims(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def arrays(self) -> list:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


def model_dims(n_zones: int) -> list[int]:
    return [building_dim(n_zones) + action_dim(n_zones) + env_dim(n_zones), *HIDDEN, building_dim(n_zones)]


def xavier_init(dims, seed: int) -> MlpParams:
    """Uniform Xavier weights on +-sqrt(6/(fan_in+fan_out)), zero biases."""
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValueError(f"invalid layer dimensions {dims}")
    rng = np.random.default_rng(seed)
    ws, bs = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        lim = math.sqrt(6.0 / (fan_in + fan_out))
        ws.append(rng.uniform(-lim, lim, size=(fan_in, fan_out)))
        bs.append(np.zeros(fan_out))
    return MlpParams(ws, bs)


def mlp_apply(params: MlpParams, x):
    """ReLU hidden layers, linear output. ``x`` has shape (..., in)."""
    h = np.asarray(x, dtype=float)
    if h.shape[-1] != params.weights[0].shape[0]:
        raise ValueError(f"input width {h.shape[-1]} != {params.weights[0].shape[0]}")
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w + b
        if i < last:
            h = np.maximum(h, 0.0)
    return h


def forward(params: MlpParams, s, a, e):
    """Standardized building-state delta from standardized s, a, e."""
    return mlp_apply(params, np.concatenate([np.asarray(s), np.asarray(a), np.asarray(e)], axis=-1))


def loss(params: MlpParams, x, y) -> float:
    """Mean over the batch of 0.5 * ||y - f(x)||^2."""
    r = np.asarray(y) - mlp_apply(params, x)
    return float(0.5 * np.sum(r * r) / len(r))


def loss_and_gradient(params: MlpParams, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) == 0:
        raise ValueError("empty batch")
    acts = [x]
    pre = []
    h = x
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0) if i < last else z
        acts.append(h)
    n = len(x)
    r = h - y
    value = 0.5 * np.sum(r * r) / n
    delta = r / n
    gw = [None] * len(params.weights)
    gb = [None] * len(params.weights)
    for i in range(last, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i].T) * (pre[i - 1] > 0)
    return float(value), MlpParams(gw, gb)


def gradient(params: MlpParams, x, y) -> MlpParams:
    return loss_and_gradient(params, x, y)[1]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 512
    epochs: int = 40
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 0:
            raise ValueError("invalid training configuration")


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0

    @classmethod
    def zeros_like(cls, params: MlpParams) -> "AdamState":
        arrs = params.arrays()
        return cls([np.zeros_like(a) for a in arrs], [np.zeros_like(a) for a in arrs])


def adam_update(params: MlpParams, grads: MlpParams, state: AdamState, cfg: TrainConfig) -> None:
    """In-place Adam step on ``params``."""
    state.t += 1
    c1 = 1.0 - cfg.beta1**state.t
    c2 = 1.0 - cfg.beta2**state.t
    for p, g, m, v in zip(params.arrays(), grads.arrays(), state.m, state.v):
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps)


@dataclass
class LossHistory:
    train: list = field(default_factory=list)
    val: list = field(default_factory=list)


def train(params: MlpParams, x_train, y_train, cfg: TrainConfig, x_val=None, y_val=None):
    """Mini-batch Adam on standardized arrays.

    Entry 0 of the returned history holds full-pass losses before any update.
    For epoch k >= 1 the train entry is the sample-weighted mean of the
    mini-batch losses seen during the epoch and the val entry is the loss
    after it. Each epoch shuffles with a generator seeded from
    (cfg.seed, epoch); the last partial batch is kept.
    """
    params = params.copy()
    hist = LossHistory()
    have_val = x_val is not None and len(x_val) > 0

    def record(train_value):
        hist.train.append(train_value)
        hist.val.append(loss(params, x_val, y_val) if have_val else float("nan"))

    record(loss(params, x_train, y_train))
    if cfg.epochs == 0:
        return params, hist
    state = AdamState.zeros_like(params)
    n = len(x_train)
    for epoch in range(1, cfg.epochs + 1):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            value, grads = loss_and_gradient(params, x_train[idx], y_train[idx])
            if not math.isfinite(value):
                raise DivergenceError(f"non-finite loss in epoch {epoch}")
            total += value * len(idx)
            adam_update(params, grads, state, cfg)
        record(total / n)
        if not math.isfinite(hist.train[-1]):
            raise DivergenceError(f"non-finite loss after epoch {epoch}")
    return params, hist


class DynamicsModel:
    """MLP plus input/target normalization; predicts raw-unit deltas."""

    def __init__(self, n_zones: int, params: MlpParams, input_stats: NormStats, target_stats: NormStats):
        self.n_zones = n_zones
        self.params = params
        self.input_stats = input_stats
        self.target_stats = target_stats
        if params.dims != model_dims(n_zones):
            raise ValueError(f"parameter dims {params.dims} do not fit {n_zones} zones")

    @property
    def error_scale(self) -> np.ndarray:
        return self.target_stats.std

    def delta(self, s, a, e):
        x = np.concatenate(_lead(s, a, e), axis=-1)
        xs = (x - self.input_stats.mean) / self.input_stats.std
        return mlp_apply(self.params, xs) * self.target_stats.std + self.target_stats.mean

    def predict(self, s, a, e):
        return np.asarray(s, dtype=float) + self.delta(s, a, e)

    def save(self, path) -> None:
        lines = [
            f"zonempc-dynamics {FORMAT_VERSION}",
            f"n_zones {self.n_zones}",
            "dims " + " ".join(str(d) for d in self.params.dims),
            f"layout {layout_hash(self.n_zones)}",
        ]
        for name, arr in (
            ("input_mean", self.input_stats.mean),
            ("input_std", self.input_stats.std),
            ("target_mean", self.target_stats.mean),
            ("target_std", self.target_stats.std),
        ):
            lines.append(name + " " + _fmt(arr))
        for i, (w, b) in enumerate(zip(self.params.weights, self.params.biases)):
            lines.append(f"W{i} " + _fmt(w))
            lines.append(f"b{i} " + _fmt(b))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "DynamicsModel":
        rows = Path(path).read_text().splitlines()
        head = rows[0].split()
        if head[0] != "zonempc-dynamics" or int(head[1]) != FORMAT_VERSION:
            raise ValueError(f"{path}: not a version {FORMAT_VERSION} dynamics model file")
        kv = {}
        for r in rows[1:]:
            if r:
                k, _, v = r.partition(" ")
                kv[k] = v
        n = int(kv["n_zones"])
        if kv["layout"] != layout_hash(n):
            raise ValueError(f"{path}: state layout hash mismatch")
        dims = [int(d) for d in kv["dims"].split()]
        vec = lambda k: np.array([float(t) for t in kv[k].split()])
        ws, bs = [], []
        for i, (fi, fo) in enumerate(zip(dims[:-1], dims[1:])):
            ws.append(vec(f"W{i}").reshape(fi, fo))
            bs.append(vec(f"b{i}"))
        return cls(
            n,
            MlpParams(ws, bs),
            NormStats(vec("input_mean"), vec("input_std")),
            NormStats(vec("target_mean"), vec("target_std")),
        )


def _fmt(arr) -> str:
    return " ".join(format(float(x), ".17g") for x in np.asarray(arr).reshape(-1))


def _lead(s, a, e):
    """Broadcast leading dims of s, a, e (last axis kept)."""
    s, a, e = (np.asarray(v, dtype=float) for v in (s, a, e))
    lead = np.broadcast_shapes(s.shape[:-1], a.shape[:-1], e.shape[:-1])
    return (np.broadcast_to(s, lead + s.shape[-1:]), np.broadcast_to(a, lead + a.shape[-1:]), np.broadcast_to(e, lead + e.shape[-1:]))


def fit_model(dataset, cfg: TrainConfig, init_seed: int, val=None):
    """Fit normalization on ``dataset`` and train one model from scratch."""
    x, y = dataset.model_arrays()
    in_stats = NormStats.fit(x)
    out_stats = NormStats.fit(y)
    xs, ys = (x - in_stats.mean) / in_stats.std, (y - out_stats.mean) / out_stats.std
    xv = yv = None
    if val is not None and len(val):
        vx, vy = val.model_arrays()
        xv, yv = (vx - in_stats.mean) / in_stats.std, (vy - out_stats.mean) / out_stats.std
    params = xavier_init(model_dims(dataset.n_zones), init_seed)
    params, hist = train(params, xs, ys, cfg, xv, yv)
    return DynamicsModel(dataset.n_zones, params, in_stats, out_stats), hist
