"""Per-feature standardization fitted on training data only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyTrainingSetError


@dataclass(frozen=True)
class StandardScaler:
    """Per-feature mean and population standard deviation. Zero-variance
    features scale to exactly 0."""

    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def fit_scaler(features) -> StandardScaler:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyTrainingSetError("scaler needs at least one training row")
    return StandardScaler(mean=X.mean(axis=0), std=X.std(axis=0))


def apply_scaler(scaler: StandardScaler, x) -> np.ndarray:
    """(x - mean) / std per feature; zero-variance features map to 0."""
    X = np.asarray(x, dtype=np.float64)
    safe = np.where(scaler.std > 0, scaler.std, 1.0)
    out = (X - scaler.mean) / safe
    return np.where(scaler.std > 0, out, 0.0)
