"""Feed-forward Q-networks with analytic gradients, in plain numpy.

Networks are rectifier MLPs with identity outputs, trained by mean squared
error on the Q-value entries of the actions actually taken. All arithmetic is
double precision. The backward pass touches the output layer only at the
selected entries, which keeps updates cheap even for very wide joint-action
heads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TrainingDivergedError, ValidationError

HIDDEN_SIZES = (120, 84)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

_MAGIC = b"factorq-mlp-v1"


@dataclass
class MLP:
    """Weight matrices (fan_in x fan_out) and bias vectors, one pair per layer."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def d_in(self) -> int:
        return self.weights[0].shape[0]

    @property
    def d_out(self) -> int:
        return self.weights[-1].shape[1]

    def num_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "MLP":
        return MLP([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def hidden_activations(self, x: np.ndarray) -> np.ndarray:
        """Activation entering the output layer (the input itself for 1 layer)."""
        h = x
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
        return h

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Q-values for one input vector or a batch of rows."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d_in:
            raise DomainError(f"input has {x.shape[-1]} features, network expects {self.d_in}")
        return self.hidden_activations(x) @ self.weights[-1] + self.biases[-1]

    def forward_select(self, x: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """Q-values of chosen actions only; skips the full output matmul."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.d_in:
            raise DomainError(f"input has {x.shape[1]} features, network expects {self.d_in}")
        actions = np.asarray(actions)
        h = self.hidden_activations(x)
        cols = self.weights[-1].T[actions]
        return np.einsum("bh,bh->b", h, cols) + self.biases[-1][actions]


def init_mlp(
    d_in: int,
    d_out: int,
    rng: np.random.Generator,
    hidden: tuple[int, ...] = HIDDEN_SIZES,
) -> MLP:
    """Fan-in uniform weights, zero biases."""
    if d_in < 1 or d_out < 1:
        raise ValidationError("d_in and d_out must be >= 1")
    sizes = (d_in,) + tuple(hidden) + (d_out,)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MLP(weights, biases)


def loss_and_grad(
    mlp: MLP,
    inputs: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
) -> tuple[float, list[np.ndarray]]:
    """Mean squared error on selected Q-entries and its exact gradient.

    Returns the gradients in ``mlp.parameters()`` order. Only the selected
    output entries receive gradient; everything else is exactly zero.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    actions = np.asarray(actions, dtype=int).ravel()
    targets = np.asarray(targets, dtype=float).ravel()
    batch = inputs.shape[0]
    if batch == 0:
        raise DomainError("empty batch")
    if actions.shape[0] != batch or targets.shape[0] != batch:
        raise DomainError("inputs, actions and targets must agree in length")
    if not np.all(np.isfinite(targets)):
        raise DomainError("non-finite regression target")

    # Forward, keeping every hidden activation.
    acts = [inputs]
    for w, b in zip(mlp.weights[:-1], mlp.biases[:-1]):
        acts.append(np.maximum(acts[-1] @ w + b, 0.0))
    h_last = acts[-1]

    w_out, b_out = mlp.weights[-1], mlp.biases[-1]
    cols = w_out.T[actions]  # (batch, fan_in of output layer)
    q_sel = np.einsum("bh,bh->b", h_last, cols) + b_out[actions]
    diff = q_sel - targets
    loss = float(diff @ diff) / batch
    delta = (2.0 / batch) * diff

    # Output layer: scatter-add per selected column.
    dw_out_t = np.zeros((w_out.shape[1], w_out.shape[0]))
    np.add.at(dw_out_t, actions, h_last * delta[:, None])
    db_out = np.zeros_like(b_out)
    np.add.at(db_out, actions, delta)
    grad_h = delta[:, None] * cols

    grads: list[np.ndarray] = [np.ascontiguousarray(dw_out_t.T), db_out]
    for layer in range(len(mlp.weights) - 2, -1, -1):
        grad_h = grad_h * (acts[layer + 1] > 0.0)  # through the rectifier
        grads.append(acts[layer].T @ grad_h)
        grads.append(grad_h.sum(axis=0))
        if layer > 0:
            grad_h = grad_h @ mlp.weights[layer].T
    grads.reverse()
    return loss, grads


@dataclass
class AdamState:
    """First/second moment accumulators plus the shared step counter."""

    alpha: float
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS


def init_adam(mlp: MLP, alpha: float) -> AdamState:
    params = mlp.parameters()
    return AdamState(
        alpha=alpha,
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
    )


def adam_step(mlp: MLP, grads: list[np.ndarray], state: AdamState) -> None:
    """One bias-corrected update, in place. Rejects non-finite numbers."""
    params = mlp.parameters()
    if len(grads) != len(params):
        raise DomainError(f"expected {len(params)} gradient arrays, got {len(grads)}")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise TrainingDivergedError("non-finite gradient; update rejected")
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(g)
        p -= state.alpha * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        if not np.all(np.isfinite(p)):
            raise TrainingDivergedError("non-finite parameter after update")


@dataclass
class TargetPair:
    """An online network, its delayed copy, and the blending schedule."""

    online: MLP
    target: MLP
    adam: AdamState
    tau: float
    update_freq: int
    grad_steps: int = 0

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError("tau must lie in [0, 1]")
        if self.update_freq < 1:
            raise ValidationError("update frequency must be >= 1")


def make_target_pair(mlp: MLP, alpha: float, tau: float, update_freq: int) -> TargetPair:
    return TargetPair(
        online=mlp,
        target=mlp.copy(),
        adam=init_adam(mlp, alpha),
        tau=tau,
        update_freq=update_freq,
    )


def soft_update(pair: TargetPair) -> None:
    """Blend the target toward the online parameters: tau*online + (1-tau)*target."""
    for p_t, p_o in zip(pair.target.parameters(), pair.online.parameters()):
        p_t *= 1.0 - pair.tau
        p_t += pair.tau * p_o


def save_mlp(fh, mlp: MLP) -> None:
    """Binary block: magic, layer sizes, then row-major float64 parameters."""
    sizes = " ".join(str(s) for s in mlp.layer_sizes)
    fh.write(_MAGIC + b" " + sizes.encode() + b"\n")
    for p in mlp.parameters():
        fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_mlp(fh) -> MLP:
    header = fh.readline().rstrip(b"\n")
    if not header.startswith(_MAGIC + b" "):
        raise DomainError("not a network checkpoint block")
    sizes = [int(s) for s in header[len(_MAGIC) + 1 :].split()]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = np.frombuffer(fh.read(fan_in * fan_out * 8), dtype="<f8").reshape(fan_in, fan_out)
        b = np.frombuffer(fh.read(fan_out * 8), dtype="<f8")
        weights.append(w.copy())
        biases.append(b.copy())
    return MLP(weights, biases)


def save_mlp_file(path: str | os.PathLike, mlp: MLP) -> None:
    with open(path, "wb") as fh:
        save_mlp(fh, mlp)


def load_mlp_file(path: str | os.PathLike) -> MLP:
    with open(path, "rb") as fh:
        return load_mlp(fh)
