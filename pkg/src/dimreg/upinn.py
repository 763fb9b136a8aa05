"""Universal physics-informed neural network for hidden-term recovery.

Two small MLPs are trained jointly: a surrogate for the trajectory u(t)
and a network for the unknown term G.  The loss is
``lambda_mse * L_mse + lambda_ode * L_ode`` where L_mse is the mean squared
data residual and L_ode the mean squared ODE residual at collocation
points, with the surrogate differentiated exactly with respect to its
scalar input (first or second order).

The numpy forward/derivative functions here are an independent
implementation of the same arithmetic used in training (training runs on
torch for reverse-mode parameter gradients and Adam).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .data import Dataset


class TrainingError(RuntimeError):
    """Divergence (non-finite loss) during training; carries the epoch."""


@dataclass
class MLP:
    """Fully-connected net, tanh hidden activations, linear output layer."""

    sizes: tuple[int, ...]
    weights: list[np.ndarray]  # weights[i] has shape (sizes[i+1], sizes[i])
    biases: list[np.ndarray]
    activation: str = "tanh"

    def __post_init__(self):
        if self.activation != "tanh":
            raise ValueError("only the tanh activation is supported")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.sizes[i + 1], self.sizes[i]) or b.shape != (self.sizes[i + 1],):
                raise ValueError("layer shapes inconsistent with sizes")
        if not all(np.all(np.isfinite(w)) for w in self.weights):
            raise ValueError("non-finite parameters")

    @property
    def n_inputs(self) -> int:
        return self.sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.sizes[-1]


def init_mlp(sizes, seed: int, activation: str = "tanh") -> MLP:
    """Layer-wise uniform init scaled by fan-in, fully seed-determined."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MLP(sizes=tuple(sizes), weights=weights, biases=biases, activation=activation)


def forward(net: MLP, x) -> np.ndarray:
    """Affine-then-tanh composition with a linear output layer.

    ``x`` may be a single input vector (d,) or a batch (n, d).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    z = x[None, :] if single else x
    if z.shape[1] != net.n_inputs:
        raise ValueError(f"expected {net.n_inputs} inputs, got {z.shape[1]}")
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = z @ w.T + b
        if i != last:
            z = np.tanh(z)
    return z[0] if single else z


def forward_derivatives(net: MLP, t: float, order: int = 1):
    """Value and exact input-derivatives of a scalar-input network.

    Propagates (value, d/dt, d^2/dt^2) through every layer by the chain
    rule; no finite differences.  Returns (u, du) or (u, du, d2u), each an
    array of length ``net.n_outputs``.
    """
    if net.n_inputs != 1:
        raise ValueError("input derivatives require a scalar-input network")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    z = np.array([float(t)])
    dz = np.array([1.0])
    d2z = np.array([0.0])
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = w @ z + b
        da = w @ dz
        d2a = w @ d2z
        if i != last:
            s = np.tanh(a)
            sp = 1.0 - s * s          # tanh'
            spp = -2.0 * s * sp       # tanh''
            z = s
            dz = sp * da
            d2z = sp * d2a + spp * da * da
        else:
            z, dz, d2z = a, da, d2a
    return (z, dz) if order == 1 else (z, dz, d2z)


@dataclass
class UPINNConfig:
    surrogate_widths: tuple[int, ...] = (32, 32)
    hidden_widths: tuple[int, ...] = (32, 32)
    learning_rate: float = 1e-3
    epochs: int = 20000
    collocation: int = 200
    lambda_mse: float = 1.0
    lambda_ode: float = 1.0
    seed: int = 0
    derivative_order: int = 1
    mass: float = 1.0          # coefficient of the highest derivative (order 2)
    hidden_states: tuple[int, ...] = (0,)   # surrogate outputs fed to the hidden net
    hidden_extra: tuple[float, ...] = ()    # constant features appended to its input

    def __post_init__(self):
        if self.collocation < 1:
            raise ValueError("need at least one collocation point")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.lambda_mse < 0 or self.lambda_ode < 0 or (self.lambda_mse == 0 and self.lambda_ode == 0):
            raise ValueError("loss weights must be nonnegative and not both zero")
        if self.derivative_order not in (1, 2):
            raise ValueError("derivative order must be 1 or 2")


@dataclass
class TrainedUPINN:
    surrogate: MLP
    hidden_net: MLP
    loss_history: list[tuple[float, float]]  # per-epoch (L_mse, L_ode)
    config: UPINNConfig


def hidden_input(cfg: UPINNConfig, u: np.ndarray) -> np.ndarray:
    """Hidden-net input rows from surrogate outputs plus constant features."""
    u = np.atleast_2d(u)
    cols = [u[:, list(cfg.hidden_states)]]
    for c in cfg.hidden_extra:
        cols.append(np.full((u.shape[0], 1), float(c)))
    return np.concatenate(cols, axis=1)


def loss_mse(surrogate: MLP, data: Dataset) -> float:
    """Mean over rows of the squared data residual ||U(t_i) - u_i||^2."""
    if len(data) == 0:
        raise ValueError("empty dataset")
    t = data.rows[:, :1]
    u = data.rows[:, 1:]
    pred = forward(surrogate, t)
    return float(np.mean(np.sum((pred - u) ** 2, axis=1)))


def loss_ode(surrogate: MLP, hidden: MLP, known_rhs, colloc, order: int = 1,
             mass: float = 1.0, cfg: UPINNConfig | None = None) -> float:
    """Mean squared ODE residual over collocation points.

    First order: dU/dt - (known(U, t) + G).  Second order:
    mass * d2U/dt2 - (known(U, dU/dt, t) + G).  ``known_rhs`` is called as
    ``known_rhs(u, du, t)`` with numpy arrays.
    """
    colloc = np.asarray(colloc, dtype=float).ravel()
    if colloc.size == 0:
        raise ValueError("empty collocation set")
    cfg = cfg or UPINNConfig(derivative_order=order, mass=mass)
    total = 0.0
    for t in colloc:
        out = forward_derivatives(surrogate, t, order=order)
        u, du = out[0], out[1]
        g = forward(hidden, hidden_input(cfg, u)[0])
        known = np.asarray(known_rhs(u, du, t), dtype=float).ravel()
        if order == 1:
            res = du - (known + g)
        else:
            res = mass * out[2] - (known + g)
        total += float(np.sum(res ** 2))
    return total / colloc.size


def _torch_mlp(net: MLP, torch):
    ws = [torch.tensor(w, dtype=torch.float64, requires_grad=True) for w in net.weights]
    bs = [torch.tensor(b, dtype=torch.float64, requires_grad=True) for b in net.biases]
    return ws, bs


def _torch_forward(ws, bs, x, torch):
    z = x
    last = len(ws) - 1
    for i, (w, b) in enumerate(zip(ws, bs)):
        z = z @ w.T + b
        if i != last:
            z = torch.tanh(z)
    return z


def _torch_losses(sw, sb, hw, hb, t_data, u_data, t_col, known_rhs, cfg, torch):
    pred = _torch_forward(sw, sb, t_data, torch)
    l_mse = ((pred - u_data) ** 2).sum(dim=1).mean()

    u_c = _torch_forward(sw, sb, t_col, torch)
    m = u_c.shape[1]
    du_cols = []
    for j in range(m):
        (gj,) = torch.autograd.grad(u_c[:, j].sum(), t_col, create_graph=True)
        du_cols.append(gj)
    du = torch.cat(du_cols, dim=1)
    if cfg.derivative_order == 2:
        d2_cols = []
        for j in range(m):
            (gj,) = torch.autograd.grad(du[:, j].sum(), t_col, create_graph=True)
            d2_cols.append(gj)
        d2u = torch.cat(d2_cols, dim=1)
    g_in_cols = [u_c[:, list(cfg.hidden_states)]]
    for c in cfg.hidden_extra:
        g_in_cols.append(torch.full((u_c.shape[0], 1), float(c), dtype=torch.float64))
    g = _torch_forward(hw, hb, torch.cat(g_in_cols, dim=1), torch)
    known = known_rhs(u_c, du, t_col)
    if cfg.derivative_order == 1:
        res = du - (known + g)
    else:
        res = cfg.mass * d2u - (known + g)
    l_ode = (res ** 2).sum(dim=1).mean()
    return l_mse, l_ode


def train(cfg: UPINNConfig, data: Dataset, known_rhs, colloc) -> TrainedUPINN:
    """Joint gradient training of the surrogate and hidden networks.

    Parameter gradients come from exact reverse-mode accumulation; the
    optimizer is Adam at the configured learning rate.  Fully deterministic
    given (config, data, collocation points).
    """
    import torch

    if len(data) == 0:
        raise ValueError("empty dataset")
    torch.set_num_threads(1)

    n_states = len(data.columns) - 1
    surrogate = init_mlp((1, *cfg.surrogate_widths, n_states), seed=cfg.seed)
    hidden_in = len(cfg.hidden_states) + len(cfg.hidden_extra)
    hidden = init_mlp((hidden_in, *cfg.hidden_widths, n_states), seed=cfg.seed + 1)

    sw, sb = _torch_mlp(surrogate, torch)
    hw, hb = _torch_mlp(hidden, torch)
    t_data = torch.tensor(data.rows[:, :1], dtype=torch.float64)
    u_data = torch.tensor(data.rows[:, 1:], dtype=torch.float64)
    t_col = torch.tensor(np.asarray(colloc, dtype=float).reshape(-1, 1),
                         dtype=torch.float64, requires_grad=True)

    params = sw + sb + hw + hb
    opt = torch.optim.Adam(params, lr=cfg.learning_rate)
    history: list[tuple[float, float]] = []
    for epoch in range(cfg.epochs):
        opt.zero_grad()
        l_mse, l_ode = _torch_losses(sw, sb, hw, hb, t_data, u_data, t_col,
                                     known_rhs, cfg, torch)
        loss = cfg.lambda_mse * l_mse + cfg.lambda_ode * l_ode
        if not torch.isfinite(loss):
            raise TrainingError(f"non-finite loss at epoch {epoch}")
        loss.backward()
        opt.step()
        history.append((float(l_mse.detach()), float(l_ode.detach())))

    surrogate.weights = [w.detach().numpy().copy() for w in sw]
    surrogate.biases = [b.detach().numpy().copy() for b in sb]
    hidden.weights = [w.detach().numpy().copy() for w in hw]
    hidden.biases = [b.detach().numpy().copy() for b in hb]
    return TrainedUPINN(surrogate=surrogate, hidden_net=hidden,
                        loss_history=history, config=cfg)


def sample_hidden(model: TrainedUPINN, inputs: Dataset, column: str = "G_hat") -> Dataset:
    """Append the hidden net's prediction at each input row.

    Input columns must match the hidden net's input arity; the result is
    the dataset handed to the symbolic regressor.
    """
    if len(inputs.columns) != model.hidden_net.n_inputs:
        raise ValueError(
            f"hidden net takes {model.hidden_net.n_inputs} inputs, "
            f"dataset has {len(inputs.columns)} columns"
        )
    g = forward(model.hidden_net, inputs.rows)
    rows = np.column_stack([inputs.rows, g[:, 0]])
    meta = dict(inputs.meta)
    meta["generator"] = meta.get("generator", "") + "+hidden_net"
    return Dataset(columns=inputs.columns + [column], rows=rows, meta=meta)


def model_to_json(model: TrainedUPINN) -> str:
    def net_doc(net: MLP):
        return {
            "sizes": list(net.sizes),
            "activation": net.activation,
            "weights": [w.ravel().tolist() for w in net.weights],
            "biases": [b.tolist() for b in net.biases],
        }

    doc = {
        "surrogate": net_doc(model.surrogate),
        "hidden_net": net_doc(model.hidden_net),
        "config": asdict(model.config),
        "loss_history": model.loss_history,
    }
    return json.dumps(doc)


def model_from_json(text: str) -> TrainedUPINN:
    doc = json.loads(text)

    def net(doc_net):
        sizes = tuple(doc_net["sizes"])
        weights = [
            np.array(w, dtype=float).reshape(sizes[i + 1], sizes[i])
            for i, w in enumerate(doc_net["weights"])
        ]
        biases = [np.array(b, dtype=float) for b in doc_net["biases"]]
        return MLP(sizes=sizes, weights=weights, biases=biases,
                   activation=doc_net["activation"])

    cfg_doc = doc["config"]
    for key in ("surrogate_widths", "hidden_widths", "hidden_states", "hidden_extra"):
        cfg_doc[key] = tuple(cfg_doc[key])
    return TrainedUPINN(
        surrogate=net(doc["surrogate"]),
        hidden_net=net(doc["hidden_net"]),
        loss_history=[tuple(x) for x in doc["loss_history"]],
        config=UPINNConfig(**cfg_doc),
    )
