import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zonempc.core import split_train_val
from zonempc.dynamics import (
    HIDDEN,
    DivergenceError,
    DynamicsModel,
    MlpParams,
    TrainConfig,
    fit_model,
    forward,
    gradient,
    loss,
    loss_and_gradient,
    mlp_apply,
    model_dims,
    train,
    xavier_init,
)


def fd_gradient(params, x, y, h=1e-5):
    """Central finite differences of the loss w.r.t. every parameter."""
    out = []
    for arr in params.arrays():
        g = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = arr[idx]
            arr[idx] = old + h
            up = loss(params, x, y)
            arr[idx] = old - h
            down = loss(params, x, y)
            arr[idx] = old
            g[idx] = (up - down) / (2 * h)
        out.append(g)
    return out


def rel_err(a, b):
    return np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b)))


def test_dims_for_five_zones():
    assert model_dims(5) == [47, 200, 200, 25]
    assert HIDDEN == (200, 200)


def test_xavier_bounds_and_zero_bias():
    p = xavier_init(model_dims(5), seed=0)
    assert np.all(np.abs(p.weights[0]) <= np.sqrt(6 / 247))
    for w in p.weights:
        fan_in, fan_out = w.shape
        assert np.all(np.abs(w) <= np.sqrt(6 / (fan_in + fan_out)))
    assert all(np.all(b == 0) for b in p.biases)
    q = xavier_init(model_dims(5), seed=1)
    assert not np.array_equal(p.weights[0], q.weights[0])
    assert np.array_equal(p.weights[0], xavier_init(model_dims(5), seed=0).weights[0])


def test_zero_params_predict_no_change():
    p = xavier_init([47, 200, 200, 25], 0)
    zero = MlpParams([np.zeros_like(w) for w in p.weights], [np.zeros_like(b) for b in p.biases])
    out = forward(zero, np.ones(25), np.ones(10), np.ones(12))
    assert out.shape == (25,) and np.all(out == 0)


def test_forward_deterministic(rng):
    p = xavier_init(model_dims(5), 3)
    s, a, e = rng.normal(size=25), rng.normal(size=10), rng.normal(size=12)
    assert np.array_equal(forward(p, s, a, e), forward(p, s, a, e))
    assert np.array_equal(forward(p, s, a, e), mlp_apply(p, np.concatenate([s, a, e])))


def test_loss_zero_for_perfect_predictor(rng):
    p = xavier_init([4, 8, 8, 3], 0)
    x = rng.normal(size=(10, 4))
    assert loss(p, x, mlp_apply(p, x)) == 0.0


def test_loss_quadratic_in_residual(rng):
    p = xavier_init([4, 8, 8, 3], 0)
    x = rng.normal(size=(10, 4))
    pred = mlp_apply(p, x)
    r = rng.normal(size=pred.shape)
    assert loss(p, x, pred + 2 * r) == pytest.approx(4 * loss(p, x, pred + r), rel=1e-12)


def test_loss_is_half_mean_squared_norm(rng):
    p = xavier_init([4, 8, 8, 3], 0)
    x, y = rng.normal(size=(6, 4)), rng.normal(size=(6, 3))
    expected = np.mean(0.5 * np.sum((y - mlp_apply(p, x)) ** 2, axis=1))
    assert loss(p, x, y) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    p = xavier_init([4, 8, 8, 3], seed)
    for b in p.biases:
        b += rng.normal(scale=0.1, size=b.shape)
    x, y = rng.normal(size=(10, 4)), rng.normal(size=(10, 3))
    analytic = gradient(p, x, y).arrays()
    numeric = fd_gradient(p, x, y)
    for a, n in zip(analytic, numeric):
        assert rel_err(a, n) < 1e-4 or np.max(np.abs(a - n)) < 1e-9


def test_loss_and_gradient_consistent(rng):
    p = xavier_init([4, 8, 8, 3], 2)
    x, y = rng.normal(size=(5, 4)), rng.normal(size=(5, 3))
    value, g = loss_and_gradient(p, x, y)
    assert value == loss(p, x, y)
    assert all(np.array_equal(a, b) for a, b in zip(g.arrays(), gradient(p, x, y).arrays()))


def test_single_batch_overfit(rng):
    x, y = rng.normal(size=(64, 6)), rng.normal(size=(64, 3))
    p = xavier_init([6, 200, 200, 3], 0)
    trained, hist = train(p, x, y, TrainConfig(epochs=200, batch_size=512, learning_rate=1e-3))
    assert loss(trained, x, y) < 1e-3


def test_zero_epochs_unchanged(rng):
    p = xavier_init([3, 8, 8, 2], 0)
    out, hist = train(p, rng.normal(size=(20, 3)), rng.normal(size=(20, 2)), TrainConfig(epochs=0))
    assert all(np.array_equal(a, b) for a, b in zip(out.arrays(), p.arrays()))
    assert len(hist.train) == 1


def test_training_reproducible(rng):
    x, y = rng.normal(size=(100, 3)), rng.normal(size=(100, 2))
    cfg = TrainConfig(epochs=3, batch_size=32, seed=7)
    a, ha = train(xavier_init([3, 8, 8, 2], 0), x, y, cfg)
    b, hb = train(xavier_init([3, 8, 8, 2], 0), x, y, cfg)
    assert all(np.array_equal(u, v) for u, v in zip(a.arrays(), b.arrays()))
    assert ha.train == hb.train


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_reported(rng):
    x, y = rng.normal(size=(20, 3)), np.full((20, 2), np.inf)
    with pytest.raises(DivergenceError, match="epoch 1"):
        train(xavier_init([3, 4, 4, 2], 0), x, y, TrainConfig(epochs=2, batch_size=8))


def test_train_config_defaults():
    cfg = TrainConfig()
    assert (cfg.learning_rate, cfg.batch_size, cfg.epochs) == (1e-3, 512, 40)
    assert (cfg.beta1, cfg.beta2, cfg.eps) == (0.9, 0.999, 1e-8)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


@pytest.fixture(scope="module")
def fitted(small_dataset):
    tr, va = split_train_val(small_dataset, 0.8, 0)
    return fit_model(tr, TrainConfig(epochs=8, seed=1), init_seed=2, val=va)


def test_validation_loss_drops(fitted):
    _, hist = fitted
    assert hist.val[5] < hist.val[0]


def test_model_predicts_building_state_only(fitted, small_dataset):
    model, _ = fitted
    s = small_dataset.states[:4]
    pred = model.predict(s[:, :25], small_dataset.actions[:4], s[:, 25:])
    assert pred.shape == (4, 25)


def test_model_file_roundtrip_bit_exact(fitted, small_dataset, tmp_path):
    model, _ = fitted
    path = tmp_path / "m.txt"
    model.save(path)
    back = DynamicsModel.load(path)
    s = small_dataset.states
    a = small_dataset.actions
    assert np.array_equal(model.predict(s[:, :25], a, s[:, 25:]), back.predict(s[:, :25], a, s[:, 25:]))
    header = path.read_text().splitlines()[:3]
    assert any("47,200,200,25" in line or "47 200 200 25" in line for line in header + path.read_text().splitlines()[:8])


def test_model_file_rejects_layout_mismatch(fitted, tmp_path):
    model, _ = fitted
    path = tmp_path / "m.txt"
    model.save(path)
    text = path.read_text().replace("zonempc-dynamics 1", "zonempc-dynamics 99", 1)
    path.write_text(text)
    with pytest.raises(ValueError):
        DynamicsModel.load(path)
