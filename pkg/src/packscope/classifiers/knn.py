"""k-nearest-neighbors over standardized features."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyTrainingSetError, InvalidParamsError, KTooLargeError
from .base import validate_training_data
from .scaler import StandardScaler, fit_scaler, apply_scaler


@dataclass(frozen=True)
class KnnModel:
    kind = "knn"
    scaler: StandardScaler
    k: int
    X: np.ndarray = field(repr=False)  # scaled training rows
    y: np.ndarray = field(repr=False)

    def _scores(self, Q: np.ndarray) -> np.ndarray:
        # Squared distances preserve the ordering; ties broken by training
        # index via lexsort for run-to-run reproducibility. One query at a
        # time keeps the distance computation exact (no dot-product expansion)
        # and the memory footprint flat.
        idx = np.arange(self.X.shape[0])
        scores = np.empty(Q.shape[0])
        for i in range(Q.shape[0]):
            d2 = ((self.X - Q[i]) ** 2).sum(axis=1)
            order = np.lexsort((idx, d2))
            scores[i] = self.y[order[: self.k]].mean()
        return scores


def train_knn(features, labels, k: int = 5) -> KnnModel:
    X, y = validate_training_data(features, labels)
    if X.shape[0] == 0:
        raise EmptyTrainingSetError("knn needs at least one training row")
    if k < 1:
        raise InvalidParamsError(f"k must be >= 1, got {k}")
    if k > X.shape[0]:
        raise KTooLargeError(f"k={k} exceeds the {X.shape[0]}-row training set")
    scaler = fit_scaler(X)
    return KnnModel(scaler=scaler, k=k, X=apply_scaler(scaler, X), y=y)
