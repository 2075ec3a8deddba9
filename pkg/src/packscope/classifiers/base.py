"""Shared prediction API over every trained model kind.

Each model exposes ``_scores(X_scaled) -> array in [0, 1]``; this module owns
input validation, scaling, and the pinned decision rule: label = 1 exactly
when the confidence score is >= 0.5 (a borderline file is routed to
unpacking rather than waved through).
"""

from __future__ import annotations

import numpy as np

from ..errors import (
    DimensionMismatchError,
    NonBinaryLabelsError,
    ScoreOutOfRangeError,
)
from .scaler import apply_scaler


def validate_training_data(features, labels):
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2:
        raise DimensionMismatchError(f"features must be 2-D, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise DimensionMismatchError(
            f"{X.shape[0]} feature rows but {y.shape} labels"
        )
    if y.size and not np.isin(y, (0, 1)).all():
        raise NonBinaryLabelsError("labels must all be 0 or 1")
    return X, y.astype(np.int64)


def predict_confidence(model, x):
    """Confidence score(s) in [0, 1]; scalar for a single vector, array for
    a matrix of row vectors."""
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.scaler.dim:
        raise DimensionMismatchError(
            f"expected vectors of length {model.scaler.dim}, got shape {np.shape(x)}"
        )
    scores = np.asarray(model._scores(apply_scaler(model.scaler, X)), dtype=np.float64)
    if not np.isfinite(scores).all() or scores.min(initial=0.0) < 0 or scores.max(initial=0.0) > 1:
        raise ScoreOutOfRangeError("model produced a score outside [0, 1]")
    return float(scores[0]) if single else scores


def predict(model, x):
    """Hard label(s): 1 iff confidence >= 0.5."""
    s = predict_confidence(model, x)
    if isinstance(s, float):
        return int(s >= 0.5)
    return (s >= 0.5).astype(np.int64)
