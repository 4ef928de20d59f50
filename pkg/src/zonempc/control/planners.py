"""Sampling-based trajectory optimizers: random shooting, CEM and MPPI.

Planners are model-agnostic: they receive an ``objective`` mapping a batch
of action sequences (K, H, A) to discounted returns (K,) (higher is better).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..core import COOL_SP_BOUNDS, HEAT_SP_BOUNDS


@dataclass(frozen=True)
class PlannerConfig:
    action_low: np.ndarray
    action_high: np.ndarray
    n_samples: int = 1000
    horizon: int = 20
    gamma: float = 0.99
    temperature: float = 1.0  # MPPI lambda
    noise_scale: np.ndarray | None = None  # MPPI sigma; default 10% of range
    cem_iters: int = 5
    elite_frac: float = 0.1
    cem_init_std: np.ndarray | None = None  # default 25% of range
    min_variance: float = 1e-6
    setpoint_pairs: bool = False  # actions are (heat, cool) pairs to keep ordered
    seed: int = 0

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.action_low, dtype=float))
        hi = np.atleast_1d(np.asarray(self.action_high, dtype=float))
        object.__setattr__(self, "action_low", lo)
        object.__setattr__(self, "action_high", hi)
        if lo.shape != hi.shape or np.any(hi < lo):
            raise ValueError("invalid action bounds")
        if self.n_samples < 1 or self.horizon < 1:
            raise ValueError("n_samples and horizon must be >= 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        rng = hi - lo
        sigma = 0.1 * rng if self.noise_scale is None else np.broadcast_to(np.asarray(self.noise_scale, float), lo.shape).copy()
        if np.any(sigma <= 0):
            raise ValueError("noise scale must be positive")
        object.__setattr__(self, "noise_scale", sigma)
        init = 0.25 * rng if self.cem_init_std is None else np.broadcast_to(np.asarray(self.cem_init_std, float), lo.shape).copy()
        object.__setattr__(self, "cem_init_std", init)

    @property
    def action_dim(self) -> int:
        return len(self.action_low)

    @property
    def n_elite(self) -> int:
        return max(1, math.ceil(self.elite_frac * self.n_samples))

    def with_(self, **kw) -> "PlannerConfig":
        return replace(self, **kw)

    @classmethod
    def for_zones(cls, n_zones: int, **kw) -> "PlannerConfig":
        lo = np.tile([HEAT_SP_BOUNDS[0], COOL_SP_BOUNDS[0]], n_zones)
        hi = np.tile([HEAT_SP_BOUNDS[1], COOL_SP_BOUNDS[1]], n_zones)
        return cls(action_low=lo, action_high=hi, setpoint_pairs=True, **kw)


def clip_actions(actions, cfg: PlannerConfig) -> np.ndarray:
    a = np.clip(actions, cfg.action_low, cfg.action_high)
    if cfg.setpoint_pairs:
        a = a.copy()
        a[..., 0::2] = np.minimum(a[..., 0::2], a[..., 1::2])
    return a


def discounted_return(rewards, gamma: float):
    """Sum over the last axis of gamma**t * r_t."""
    r = np.asarray(rewards, dtype=float)
    return r @ (gamma ** np.arange(r.shape[-1]))


def evaluate_sequences(step_fn, reward_fn, s0, actions, gamma: float):
    """Discounted return of each action sequence under explicit dynamics.

    ``step_fn(s, a, t)`` and ``reward_fn(s_next, a, t)`` operate on batches.
    """
    actions = np.asarray(actions, dtype=float)
    k, h = actions.shape[0], actions.shape[1]
    s = np.broadcast_to(np.asarray(s0, dtype=float), (k,) + np.shape(s0)).copy()
    rewards = np.empty((k, h))
    for t in range(h):
        s = step_fn(s, actions[:, t], t)
        rewards[:, t] = reward_fn(s, actions[:, t], t)
    return discounted_return(rewards, gamma)


def plan_random_shooting(objective, cfg: PlannerConfig, seed):
    """Best of K uniform sequences; ties go to the lowest sample index."""
    rng = np.random.default_rng(seed)
    seqs = rng.uniform(cfg.action_low, cfg.action_high, size=(cfg.n_samples, cfg.horizon, cfg.action_dim))
    seqs = clip_actions(seqs, cfg)
    returns = np.asarray(objective(seqs), dtype=float)
    best = int(np.argmax(returns))
    return seqs[best], float(returns[best])


def plan_cem(objective, cfg: PlannerConfig, seed, init_mean=None, init_std=None):
    """Cross-entropy method; returns the final sampling mean (H, A).

    Stops early once every variance has collapsed below ``cfg.min_variance``.
    """
    rng = np.random.default_rng(seed)
    shape = (cfg.horizon, cfg.action_dim)
    mean = np.broadcast_to(0.5 * (cfg.action_low + cfg.action_high) if init_mean is None else init_mean, shape).astype(float)
    std = np.broadcast_to(cfg.cem_init_std if init_std is None else init_std, shape).astype(float)
    for _ in range(cfg.cem_iters):
        if np.all(std**2 < cfg.min_variance):
            break
        seqs = clip_actions(mean + std * rng.standard_normal((cfg.n_samples,) + shape), cfg)
        returns = np.asarray(objective(seqs), dtype=float)
        elite = seqs[np.argsort(-returns, kind="stable")[: cfg.n_elite]]
        mean = elite.mean(axis=0)
        std = elite.std(axis=0)
    return clip_actions(mean, cfg)


def mppi_weights(costs, temperature: float) -> np.ndarray:
    """omega_k = exp(-(c_k - min c) / lambda) / eta."""
    c = np.asarray(costs, dtype=float)
    if not np.all(np.isfinite(c)):
        raise FloatingPointError("non-finite trajectory cost")
    w = np.exp(-(c - c.min()) / temperature)
    return w / w.sum()


@dataclass
class ActionSequenceBuffer:
    """Nominal H-step action sequence reused between control steps."""

    actions: np.ndarray

    @classmethod
    def filled(cls, horizon: int, action) -> "ActionSequenceBuffer":
        a = np.asarray(action, dtype=float)
        return cls(np.tile(a, (horizon, 1)))

    def __len__(self) -> int:
        return len(self.actions)

    def shift(self, fill) -> "ActionSequenceBuffer":
        """Drop the first action and append ``fill`` at the tail."""
        return ActionSequenceBuffer(np.vstack([self.actions[1:], np.asarray(fill, dtype=float)[None]]))


def mppi_update(objective, nominal, cfg: PlannerConfig, rng):
    """One importance-weighted update of the nominal sequence.

    Perturbed sequences are clipped before evaluation; the weighted raw noise
    is added to the nominal and the result is clipped again. Returns (new nominal, weights, costs).
    """
    shape = (cfg.n_samples,) + nominal.shape
    eps = cfg.noise_scale * rng.standard_normal(shape)
    seqs = clip_actions(nominal + eps, cfg)
    costs = -np.asarray(objective(seqs), dtype=float)
    w = mppi_weights(costs, cfg.temperature)
    new = clip_actions(nominal + np.tensordot(w, eps, axes=1), cfg)
    return new, w, costs


def plan_mppi(objective, cfg: PlannerConfig, buffer: ActionSequenceBuffer, seed, fill=None, iterations: int = 1):
    """MPPI step: update the buffer, return (action to execute, shifted buffer).

    ``fill`` is appended after the shift (defaults to the last nominal action).
    """
    rng = np.random.default_rng(seed)
    nominal = np.asarray(buffer.actions, dtype=float)
    if nominal.shape != (cfg.horizon, cfg.action_dim):
        raise ValueError(f"buffer shape {nominal.shape} does not match horizon/action dims")
    for _ in range(iterations):
        nominal, _, _ = mppi_update(objective, nominal, cfg, rng)
    action = nominal[0].copy()
    fill = nominal[-1] if fill is None else fill
    return action, ActionSequenceBuffer(nominal).shift(fill)
