from .mpc import PLANNERS, MPCController, evaluate_sequence, hvac_objective, mpc_step
from .planners import (
    ActionSequenceBuffer,
    PlannerConfig,
    clip_actions,
    discounted_return,
    evaluate_sequences,
    mppi_update,
    mppi_weights,
    plan_cem,
    plan_mppi,
    plan_random_shooting,
)
from .reward import RewardConfig, reward, reward_from_arrays, reward_from_building
from .rule import RuleBasedController, RuleSchedule, rule_based_policy

__all__ = [
    "PLANNERS", "MPCController", "evaluate_sequence", "hvac_objective", "mpc_step",
    "ActionSequenceBuffer", "PlannerConfig", "clip_actions", "discounted_return",
    "evaluate_sequences", "mppi_update", "mppi_weights", "plan_cem", "plan_mppi",
    "plan_random_shooting", "RewardConfig", "reward", "reward_from_arrays",
    "reward_from_building", "RuleBasedController", "RuleSchedule", "rule_based_policy",
]
