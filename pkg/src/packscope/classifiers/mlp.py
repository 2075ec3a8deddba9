"""Fully connected network: ReLU hidden layers, sigmoid output, binary
cross-entropy, full-batch gradient descent.

Initialization is pinned for reproducibility: weights are uniform in
+-sqrt(6 / (fan_in + fan_out)), drawn from the ``mlp-init`` sub-stream of the
model seed, layer by layer in network order, each matrix in row-major order;
biases start at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParamsError, NonFiniteLossError
from ..rng import Xorshift64Star, substream
from .base import validate_training_data
from .linear import sigmoid
from .scaler import StandardScaler, fit_scaler, apply_scaler


@dataclass(frozen=True)
class MlpModel:
    kind = "mlp"
    scaler: StandardScaler
    weights: tuple = field(repr=False)  # one (fan_in, fan_out) matrix per layer
    biases: tuple = field(repr=False)
    hidden_sizes: tuple = (64,)
    learning_rate: float = 0.01
    epochs: int = 500
    seed: int = 0

    def _scores(self, X: np.ndarray) -> np.ndarray:
        return _forward(self.weights, self.biases, X)[-1][:, 0]


def init_params(dims, seed: int):
    """Seeded uniform init: ``dims`` is (n_in, hidden..., 1)."""
    rng = Xorshift64Star(substream(seed, "mlp-init"))
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        w = np.array(
            [rng.next_float() for _ in range(fan_in * fan_out)], dtype=np.float64
        ).reshape(fan_in, fan_out)
        weights.append((2.0 * w - 1.0) * limit)
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward(weights, biases, X):
    """All layer activations; last entry is the sigmoid output (n, 1)."""
    acts = [X]
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = acts[-1] @ w + b
        acts.append(sigmoid(z) if i == len(weights) - 1 else np.maximum(z, 0.0))
    return acts


def mlp_loss(weights, biases, X, y) -> float:
    """Mean binary cross-entropy, computed in the numerically stable
    pre-sigmoid form."""
    a = X
    for w, b in zip(weights[:-1], biases[:-1]):
        a = np.maximum(a @ w + b, 0.0)
    z = (a @ weights[-1] + biases[-1])[:, 0]
    bce = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(bce.mean())


def mlp_grads(weights, biases, X, y):
    """Backpropagated gradients matching ``mlp_loss``."""
    n = X.shape[0]
    acts = _forward(weights, biases, X)
    delta = (acts[-1][:, 0] - y)[:, None] / n
    gw = [None] * len(weights)
    gb = [None] * len(weights)
    for layer in range(len(weights) - 1, -1, -1):
        gw[layer] = acts[layer].T @ delta
        gb[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ weights[layer].T) * (acts[layer] > 0)
    return gw, gb


def train_mlp(
    features,
    labels,
    hidden_sizes=(64,),
    learning_rate: float = 0.01,
    epochs: int = 500,
    seed: int = 0,
) -> MlpModel:
    X0, y = validate_training_data(features, labels)
    hidden = tuple(int(h) for h in hidden_sizes)
    if len(hidden) == 0 or any(h < 1 for h in hidden):
        raise InvalidParamsError("hidden_sizes must be a non-empty list of positive ints")
    if learning_rate <= 0:
        raise InvalidParamsError("learning_rate must be positive")

    scaler = fit_scaler(X0)
    X = apply_scaler(scaler, X0)
    yf = y.astype(np.float64)
    weights, biases = init_params((X.shape[1], *hidden, 1), seed)

    for epoch in range(epochs):
        loss = mlp_loss(weights, biases, X, yf)
        if not np.isfinite(loss):
            raise NonFiniteLossError(f"loss diverged at epoch {epoch}")
        gw, gb = mlp_grads(weights, biases, X, yf)
        weights = [w - learning_rate * g for w, g in zip(weights, gw)]
        biases = [b - learning_rate * g for b, g in zip(biases, gb)]

    return MlpModel(
        scaler=scaler,
        weights=tuple(weights),
        biases=tuple(biases),
        hidden_sizes=hidden,
        learning_rate=learning_rate,
        epochs=epochs,
        seed=seed,
    )
