"""Classical classifiers over texture-jet features, implemented from scratch."""

from .base import predict, predict_confidence, validate_training_data
from .forest import ForestModel, Tree, best_split, gini_impurity, train_random_forest
from .knn import KnnModel, train_knn
from .linear import (
    LogRegModel,
    SvmModel,
    logreg_grad,
    logreg_loss,
    sigmoid,
    svm_grad,
    svm_loss,
    train_linear_svm,
    train_logreg,
)
from .mlp import MlpModel, init_params, mlp_grads, mlp_loss, train_mlp
from .model_io import load_model, save_model
from .scaler import StandardScaler, apply_scaler, fit_scaler

MODEL_KINDS = ("knn", "logreg", "forest", "mlp", "svm")

TRAINERS = {
    "knn": train_knn,
    "logreg": train_logreg,
    "forest": train_random_forest,
    "mlp": train_mlp,
    "svm": train_linear_svm,
}

__all__ = [
    "predict",
    "predict_confidence",
    "validate_training_data",
    "ForestModel",
    "Tree",
    "best_split",
    "gini_impurity",
    "train_random_forest",
    "KnnModel",
    "train_knn",
    "LogRegModel",
    "SvmModel",
    "logreg_grad",
    "logreg_loss",
    "sigmoid",
    "svm_grad",
    "svm_loss",
    "train_linear_svm",
    "train_logreg",
    "MlpModel",
    "init_params",
    "mlp_grads",
    "mlp_loss",
    "train_mlp",
    "load_model",
    "save_model",
    "StandardScaler",
    "apply_scaler",
    "fit_scaler",
    "MODEL_KINDS",
    "TRAINERS",
]
