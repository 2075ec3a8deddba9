"""Linear models: logistic regression and linear SVM, full-batch (sub)gradient
descent from zero-initialized parameters.

Loss functions (n = row count, bias never regularized):

    logreg:  mean binary cross-entropy + (l2 / 2) ||w||^2
    svm:     mean hinge max(0, 1 - y*(w.x + b)) + (1 / 2C) ||w||^2,
             with labels remapped to y* in {-1, +1}

Both report confidence sigma(w.x + b); the loss and gradient helpers are
module-level so they can be checked against finite differences directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParamsError, NonFiniteLossError
from .base import validate_training_data
from .scaler import StandardScaler, fit_scaler, apply_scaler


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LinearModel:
    scaler: StandardScaler
    w: np.ndarray = field(repr=False)
    b: float

    def _scores(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(X @ self.w + self.b)

    def margin(self, X_scaled: np.ndarray) -> np.ndarray:
        return X_scaled @ self.w + self.b


@dataclass(frozen=True)
class LogRegModel(LinearModel):
    kind = "logreg"
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4


@dataclass(frozen=True)
class SvmModel(LinearModel):
    kind = "svm"
    c: float = 1.0
    learning_rate: float = 0.01
    epochs: int = 500


def logreg_loss(w, b, X, y, l2) -> float:
    z = X @ w + b
    # Stable BCE: max(z,0) - z*y + log(1 + exp(-|z|))
    bce = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(bce.mean() + 0.5 * l2 * (w @ w))


def logreg_grad(w, b, X, y, l2):
    n = X.shape[0]
    r = sigmoid(X @ w + b) - y
    return X.T @ r / n + l2 * w, float(r.mean())


def svm_loss(w, b, X, ypm, c) -> float:
    margins = 1.0 - ypm * (X @ w + b)
    return float(np.maximum(margins, 0.0).mean() + (w @ w) / (2.0 * c))


def svm_grad(w, b, X, ypm, c):
    """Subgradient; the hinge contributes only where 1 - y*(w.x+b) > 0
    (zero is taken at the kink)."""
    n = X.shape[0]
    active = ypm * (X @ w + b) < 1.0
    gw = w / c - (X[active].T @ ypm[active]) / n
    gb = -float(ypm[active].sum()) / n
    return gw, gb


def _descend(X, y, step, lr, epochs):
    """Shared loop: ``step(w, b) -> (loss, gw, gb)``; guards non-finite loss."""
    w = np.zeros(X.shape[1])
    b = 0.0
    for epoch in range(epochs):
        loss, gw, gb = step(w, b)
        if not np.isfinite(loss):
            raise NonFiniteLossError(f"loss diverged at epoch {epoch}")
        w = w - lr * gw
        b = b - lr * gb
    return w, b


def train_logreg(features, labels, learning_rate=0.1, epochs=500, l2=1e-4) -> LogRegModel:
    X0, y = validate_training_data(features, labels)
    if learning_rate <= 0:
        raise InvalidParamsError("learning_rate must be positive")
    scaler = fit_scaler(X0)
    X = apply_scaler(scaler, X0)
    yf = y.astype(np.float64)

    def step(w, b):
        return (logreg_loss(w, b, X, yf, l2), *logreg_grad(w, b, X, yf, l2))

    w, b = _descend(X, yf, step, learning_rate, epochs)
    return LogRegModel(scaler=scaler, w=w, b=b, learning_rate=learning_rate, epochs=epochs, l2=l2)


def train_linear_svm(features, labels, c=1.0, epochs=500, learning_rate=0.01) -> SvmModel:
    X0, y = validate_training_data(features, labels)
    if learning_rate <= 0 or c <= 0:
        raise InvalidParamsError("learning_rate and c must be positive")
    scaler = fit_scaler(X0)
    X = apply_scaler(scaler, X0)
    ypm = 2.0 * y - 1.0

    def step(w, b):
        return (svm_loss(w, b, X, ypm, c), *svm_grad(w, b, X, ypm, c))

    w, b = _descend(X, ypm, step, learning_rate, epochs)
    return SvmModel(scaler=scaler, w=w, b=b, c=c, learning_rate=learning_rate, epochs=epochs)
