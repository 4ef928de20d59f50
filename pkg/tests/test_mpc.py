import numpy as np
import pytest

from test_planners import grid_optimum, toy_cfg, toy_objective
from zonempc.control import (
    ActionSequenceBuffer,
    MPCController,
    PlannerConfig,
    RewardConfig,
    evaluate_sequence,
    mpc_step,
    plan_mppi,
    plan_random_shooting,
    reward_from_building,
    rule_based_policy,
)
from zonempc.core import Action
from zonempc.ensemble import Ensemble, SimulatorModel
from zonempc.simenv import BuildingSimulator, Exogenous, OccupancySchedule, synthesize_weather


@pytest.fixture(scope="module")
def setup(building):
    sim = BuildingSimulator(building)
    exo = Exogenous(synthesize_weather("fresno_jul", 1, seed=13), OccupancySchedule(seed=13))
    return sim, exo, RewardConfig.for_building(building)


def test_evaluate_sequence_single_step(setup):
    sim, exo, rcfg = setup
    s0 = sim.initial_state(exo.state(50), 24.0)
    a = rule_based_policy(50, 5).to_vector()
    model = Ensemble([SimulatorModel(sim)])
    ret = evaluate_sequence(model, s0.building_vector(), a[None], exo.window(50, 2), rcfg, 0.99)
    nxt = sim.predict_building(s0.building_vector(), a, exo.vector(50))
    assert ret == pytest.approx(float(reward_from_building(nxt, exo.occupancy(51), rcfg)))


def test_evaluate_sequence_needs_forecast(setup):
    sim, exo, rcfg = setup
    with pytest.raises(ValueError):
        evaluate_sequence(Ensemble([SimulatorModel(sim)]), np.zeros(25), np.zeros((3, 10)), exo.window(0, 2), rcfg, 0.99)


@pytest.mark.parametrize("kind", ["rs", "cem", "mppi"])
def test_mpc_step_executes_one_bounded_action(setup, kind):
    sim, exo, rcfg = setup
    cfg = PlannerConfig.for_zones(5, n_samples=32, horizon=20, seed=1)
    ctl = MPCController(kind, Ensemble([SimulatorModel(sim)]), exo, cfg, rcfg)
    state = sim.initial_state(exo.state(40), 24.0)
    action = mpc_step(ctl, 40, state)
    assert isinstance(action, Action) and action.n_zones == 5
    assert action.within_bounds()
    if kind == "mppi":
        assert len(ctl.buffer) == 20
        assert np.array_equal(ctl.buffer.actions[-1], rule_based_policy(60, 5).to_vector())
    else:
        assert ctl.buffer is None


def test_mppi_warm_start_reuses_buffer(setup):
    sim, exo, rcfg = setup
    cfg = PlannerConfig.for_zones(5, n_samples=16, horizon=6, seed=2)
    ctl = MPCController("mppi", Ensemble([SimulatorModel(sim)]), exo, cfg, rcfg)
    state = sim.initial_state(exo.state(0), 24.0)
    ctl.act(0, state)
    first = ctl.buffer.actions.copy()
    # with a vanishing noise scale the next plan executes the shifted nominal
    ctl.cfg = cfg.with_(noise_scale=1e-12)
    nxt = ctl.act(1, state)
    assert np.allclose(nxt.to_vector(), first[0], atol=1e-9)


def test_controller_plans_reproducibly(setup):
    sim, exo, rcfg = setup
    cfg = PlannerConfig.for_zones(5, n_samples=16, horizon=5, seed=3)
    state = sim.initial_state(exo.state(10), 24.0)
    a = MPCController("cem", Ensemble([SimulatorModel(sim)]), exo, cfg, rcfg).act(10, state)
    b = MPCController("cem", Ensemble([SimulatorModel(sim)]), exo, cfg, rcfg).act(10, state)
    assert a == b


def test_unknown_planner_rejected(setup):
    sim, exo, rcfg = setup
    with pytest.raises(ValueError):
        MPCController("pso", Ensemble([SimulatorModel(sim)]), exo, PlannerConfig.for_zones(5), rcfg)


def test_rs_and_mppi_agree_on_toy_optimum():
    rs, _ = plan_random_shooting(toy_objective(), toy_cfg(n_samples=20000), seed=0)
    action, _ = plan_mppi(toy_objective(), toy_cfg(n_samples=2000, noise_scale=0.5, temperature=0.01),
                          ActionSequenceBuffer(np.zeros((1, 1))), seed=0, fill=np.zeros(1), iterations=10)
    assert abs(rs[0, 0] - action[0]) < 0.05
    assert abs(action[0] - grid_optimum()) < 0.05


def test_observe_updates_ensemble_weights(setup):
    sim, exo, rcfg = setup

    class Offset:
        n_zones = 5

        def __init__(self, k):
            self.k = k

        def delta(self, s, a, e):
            return sim.predict_building(s, a, e) - s + self.k

    ens = Ensemble([Offset(0.5), Offset(0.0)], error_scale=np.ones(25))
    ctl = MPCController("rs", ens, exo, PlannerConfig.for_zones(5, n_samples=4, horizon=2), rcfg)
    from zonempc.core import Transition

    s0 = sim.initial_state(exo.state(0), 24.0)
    a = rule_based_policy(0, 5)
    s1, _, _ = sim.step(s0, a, exo.state(1))
    ctl.observe(Transition(s0, a, s1, 0))
    assert np.allclose(ens.weights, [0.0, 1.0])
