"""Network forward/derivative arithmetic, gradient checks, training."""

import json

import numpy as np
import pytest

from dimreg.data import Dataset
from dimreg.upinn import (
    MLP,
    TrainedUPINN,
    TrainingError,
    UPINNConfig,
    _torch_forward,
    _torch_losses,
    _torch_mlp,
    forward,
    forward_derivatives,
    hidden_input,
    init_mlp,
    loss_mse,
    loss_ode,
    model_from_json,
    model_to_json,
    sample_hidden,
    train,
)

from oracles import central_difference


def test_init_deterministic_and_bounded():
    a = init_mlp((1, 8, 2), seed=3)
    b = init_mlp((1, 8, 2), seed=3)
    c = init_mlp((1, 8, 2), seed=4)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert not all(np.array_equal(wa, wc) for wa, wc in zip(a.weights, c.weights))
    for fan_in, w in zip((1, 8), a.weights):
        assert np.all(np.abs(w) <= 1.0 / np.sqrt(fan_in))
    assert a.n_inputs == 1 and a.n_outputs == 2


def test_mlp_shape_validation():
    net = init_mlp((2, 4, 1), seed=0)
    with pytest.raises(ValueError):
        MLP(sizes=(2, 4, 1), weights=[w.T for w in net.weights], biases=net.biases)
    with pytest.raises(ValueError):
        MLP(sizes=(2, 4, 1), weights=[net.weights[0] * np.nan, net.weights[1]],
            biases=net.biases)
    with pytest.raises(ValueError):
        init_mlp((1, 4, 1), seed=0, activation="relu")


def test_forward_matches_manual_matmul():
    net = init_mlp((2, 5, 3), seed=1)
    x = np.array([0.3, -0.7])
    z = np.tanh(net.weights[0] @ x + net.biases[0])
    want = net.weights[1] @ z + net.biases[1]
    assert np.allclose(forward(net, x), want, rtol=1e-15)
    batch = np.array([x, 2 * x])
    out = forward(net, batch)
    assert out.shape == (2, 3)
    assert np.allclose(out[0], want, rtol=1e-15)
    with pytest.raises(ValueError):
        forward(net, np.zeros(3))


def test_forward_derivatives_match_central_differences():
    net = init_mlp((1, 16, 16, 2), seed=5)
    h = 1e-5
    for t in (-0.8, 0.0, 1.3):
        u, du, d2u = forward_derivatives(net, t, order=2)
        assert np.allclose(u, forward(net, np.array([t])), rtol=1e-14)
        for j in range(2):
            fd1 = central_difference(lambda s: forward(net, np.array([s]))[j], t, h)
            assert abs(du[j] - fd1) < 1e-8 * (1 + abs(fd1))
            fd2 = central_difference(
                lambda s: forward_derivatives(net, s, order=1)[1][j], t, h)
            assert abs(d2u[j] - fd2) < 1e-6 * (1 + abs(fd2))
    with pytest.raises(ValueError):
        forward_derivatives(init_mlp((2, 4, 1), seed=0), 0.0)
    with pytest.raises(ValueError):
        forward_derivatives(net, 0.0, order=3)


def test_torch_forward_agrees_with_numpy():
    torch = pytest.importorskip("torch")
    net = init_mlp((1, 8, 8, 2), seed=2)
    ws, bs = _torch_mlp(net, torch)
    x = np.linspace(-1, 1, 7).reshape(-1, 1)
    got = _torch_forward(ws, bs, torch.tensor(x, dtype=torch.float64), torch)
    assert np.allclose(got.detach().numpy(), forward(net, x), rtol=1e-14)


def _toy_setup():
    t = np.linspace(0, 1, 9)
    u = np.exp(-t)
    data = Dataset(columns=["t", "u"], rows=np.column_stack([t, u]))
    cfg = UPINNConfig(surrogate_widths=(6,), hidden_widths=(6,), epochs=5,
                      collocation=8, seed=0)
    colloc = np.linspace(0, 1, 8)
    known = lambda u, du, t: -u
    return data, cfg, colloc, known


def test_torch_losses_agree_with_numpy_losses():
    torch = pytest.importorskip("torch")
    data, cfg, colloc, known = _toy_setup()
    surrogate = init_mlp((1, 6, 1), seed=cfg.seed)
    hidden = init_mlp((1, 6, 1), seed=cfg.seed + 1)
    sw, sb = _torch_mlp(surrogate, torch)
    hw, hb = _torch_mlp(hidden, torch)
    t_data = torch.tensor(data.rows[:, :1], dtype=torch.float64)
    u_data = torch.tensor(data.rows[:, 1:], dtype=torch.float64)
    t_col = torch.tensor(colloc.reshape(-1, 1), dtype=torch.float64,
                         requires_grad=True)
    l_mse_t, l_ode_t = _torch_losses(sw, sb, hw, hb, t_data, u_data, t_col,
                                     known, cfg, torch)
    assert abs(float(l_mse_t.detach()) - loss_mse(surrogate, data)) < 1e-12
    assert abs(float(l_ode_t.detach()) - loss_ode(surrogate, hidden, known,
                                                  colloc, cfg=cfg)) < 1e-12


def test_parameter_gradients_match_finite_differences():
    torch = pytest.importorskip("torch")
    data, cfg, colloc, known = _toy_setup()
    surrogate = init_mlp((1, 6, 1), seed=cfg.seed)
    hidden = init_mlp((1, 6, 1), seed=cfg.seed + 1)
    sw, sb = _torch_mlp(surrogate, torch)
    hw, hb = _torch_mlp(hidden, torch)
    t_data = torch.tensor(data.rows[:, :1], dtype=torch.float64)
    u_data = torch.tensor(data.rows[:, 1:], dtype=torch.float64)
    t_col = torch.tensor(colloc.reshape(-1, 1), dtype=torch.float64,
                         requires_grad=True)
    l_mse_t, l_ode_t = _torch_losses(sw, sb, hw, hb, t_data, u_data, t_col,
                                     known, cfg, torch)
    total = l_mse_t + l_ode_t
    total.backward()

    def numpy_total(s_net, h_net):
        return (loss_mse(s_net, data)
                + loss_ode(s_net, h_net, known, colloc, cfg=cfg))

    h = 1e-6
    rng = np.random.default_rng(0)
    # Spot-check a handful of surrogate weights and hidden weights by FD
    # through the independent numpy implementation.
    checks = 0
    for nets, torch_ws, which in ((surrogate, sw, "s"), (hidden, hw, "h")):
        for layer in range(len(nets.weights)):
            i = rng.integers(nets.weights[layer].shape[0])
            j = rng.integers(nets.weights[layer].shape[1])
            orig = nets.weights[layer][i, j]
            nets.weights[layer][i, j] = orig + h
            up = numpy_total(surrogate, hidden)
            nets.weights[layer][i, j] = orig - h
            down = numpy_total(surrogate, hidden)
            nets.weights[layer][i, j] = orig
            fd = (up - down) / (2 * h)
            got = float(torch_ws[layer].grad[i, j])
            assert abs(got - fd) < 1e-4 * (1 + abs(fd)), (which, layer, i, j)
            checks += 1
    assert checks == 4


def test_train_short_run_deterministic():
    data, cfg, colloc, known = _toy_setup()
    m1 = train(cfg, data, lambda u, du, t: -u, colloc)
    m2 = train(cfg, data, lambda u, du, t: -u, colloc)
    for w1, w2 in zip(m1.surrogate.weights, m2.surrogate.weights):
        assert np.array_equal(w1, w2)
    for w1, w2 in zip(m1.hidden_net.weights, m2.hidden_net.weights):
        assert np.array_equal(w1, w2)
    assert m1.loss_history == m2.loss_history
    assert len(m1.loss_history) == cfg.epochs
    # Training reduced the weighted loss on this toy problem.
    first = sum(m1.loss_history[0])
    last = sum(m1.loss_history[-1])
    assert last < first


def test_train_divergence_reports_epoch():
    data, cfg, colloc, known = _toy_setup()
    bad = UPINNConfig(surrogate_widths=(6,), hidden_widths=(6,), epochs=500,
                      collocation=8, seed=0, learning_rate=1e160)
    with pytest.raises(TrainingError, match=r"epoch \d+"):
        train(bad, data, known, colloc)


def test_hidden_input_and_sample_hidden():
    cfg = UPINNConfig(hidden_states=(0,), hidden_extra=(2.5,))
    u = np.array([[1.0, 3.0], [2.0, 4.0]])
    rows = hidden_input(cfg, u)
    assert np.array_equal(rows, np.array([[1.0, 2.5], [2.0, 2.5]]))

    data, tcfg, colloc, known = _toy_setup()
    model = train(tcfg, data, known, colloc)
    inputs = Dataset(columns=["u"], rows=np.linspace(0, 1, 5).reshape(-1, 1))
    out = sample_hidden(model, inputs)
    assert out.columns == ["u", "G_hat"]
    want = forward(model.hidden_net, inputs.rows)[:, 0]
    assert np.allclose(out.column("G_hat"), want, rtol=1e-14)
    bad = Dataset(columns=["a", "b"], rows=np.zeros((2, 2)))
    with pytest.raises(ValueError, match="inputs"):
        sample_hidden(model, bad)


def test_model_json_round_trip_exact():
    data, cfg, colloc, known = _toy_setup()
    model = train(cfg, data, known, colloc)
    back = model_from_json(model_to_json(model))
    assert back.config == model.config
    for w1, w2 in zip(model.surrogate.weights, back.surrogate.weights):
        assert np.array_equal(w1, w2)
    for b1, b2 in zip(model.hidden_net.biases, back.hidden_net.biases):
        assert np.array_equal(b1, b2)
    assert back.loss_history == model.loss_history
    # Valid JSON document, not a pickle.
    json.loads(model_to_json(model))
