"""Receding-horizon controllers over an ensemble model and ground-truth forecasts."""
from __future__ import annotations

import numpy as np

from ..core import Action, FullState
from .planners import (
    ActionSequenceBuffer,
    PlannerConfig,
    discounted_return,
    plan_cem,
    plan_mppi,
    plan_random_shooting,
)
from .reward import RewardConfig, reward_from_building
from .rule import RuleSchedule, rule_based_policy

PLANNERS = ("rs", "cem", "mppi")


def hvac_objective(model, s0, forecast, reward_cfg: RewardConfig, gamma: float):
    """Objective over setpoint sequences using ``model.rollout``.

    ``forecast`` rows are environment vectors for steps t, t+1, ...; the
    reward of action k uses the predicted state after it and the occupancy
    one step later (when the forecast is long enough).
    """
    forecast = np.asarray(forecast, dtype=float)
    n_zones = model.n_zones
    occ_all = forecast[:, -n_zones:]

    def objective(actions):
        h = actions.shape[-2]
        pred = model.rollout(s0, actions, forecast[:h])
        idx = np.minimum(np.arange(1, h + 1), len(forecast) - 1)
        r = reward_from_building(pred, occ_all[idx], reward_cfg)
        return discounted_return(r, gamma)

    return objective


def evaluate_sequence(model, s0, actions, forecast, reward_cfg: RewardConfig, gamma: float) -> float:
    """Discounted return of one action sequence (H, 2N) under ``model``."""
    actions = np.asarray(actions, dtype=float)
    if len(forecast) < len(actions):
        raise ValueError("forecast shorter than the action sequence")
    return float(hvac_objective(model, s0, forecast, reward_cfg, gamma)(actions[None])[0])


class MPCController:
    """Plans at every step and executes only the first action.

    MPPI keeps its shifted buffer between calls (warm start); RS and CEM
    plan from scratch each step, CEM starting from the rule-based sequence.
    """

    def __init__(
        self,
        kind: str,
        model,
        exogenous,
        cfg: PlannerConfig,
        reward_cfg: RewardConfig,
        rule_schedule: RuleSchedule = RuleSchedule(),
    ):
        if kind not in PLANNERS:
            raise ValueError(f"unknown planner {kind!r}; choose from {PLANNERS}")
        self.kind = kind
        self.model = model
        self.exo = exogenous
        self.cfg = cfg
        self.reward_cfg = reward_cfg
        self.rule_schedule = rule_schedule
        self.n_zones = model.n_zones
        self.buffer = None

    def default_action(self, step: int) -> np.ndarray:
        return rule_based_policy(step, self.n_zones, self.rule_schedule).to_vector()

    def default_sequence(self, step: int) -> np.ndarray:
        return np.stack([self.default_action(step + k) for k in range(self.cfg.horizon)])

    def plan(self, step: int, state: FullState) -> np.ndarray:
        h = self.cfg.horizon
        forecast = self.exo.window(step, h + 1)
        objective = hvac_objective(self.model, state.building_vector(), forecast, self.reward_cfg, self.cfg.gamma)
        seed = np.random.SeedSequence([self.cfg.seed, step])
        if self.kind == "rs":
            seq, _ = plan_random_shooting(objective, self.cfg, seed)
            return seq[0]
        if self.kind == "cem":
            return plan_cem(objective, self.cfg, seed, init_mean=self.default_sequence(step))[0]
        if self.buffer is None:
            self.buffer = ActionSequenceBuffer(self.default_sequence(step))
        action, self.buffer = plan_mppi(objective, self.cfg, self.buffer, seed, fill=self.default_action(step + h))
        return action

    def act(self, step: int, state: FullState) -> Action:
        return Action.from_vector(self.plan(step, state))

    def observe(self, transition) -> None:
        if hasattr(self.model, "record_observation"):
            self.model.record_observation(transition.state, transition.action, transition.next_state)


def mpc_step(controller: MPCController, step: int, state: FullState) -> Action:
    """Plan over the horizon and return only the first action."""
    return controller.act(step, state)
