"""Head training loop: Adam on the trainable parameters only, binary
cross-entropy on sigmoid scores, checkpoint-best early stopping on
validation loss, per-epoch logging (one train row plus one val row).
"""

import math
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

from .errors import DivergedLossError, InvalidParamsError
from .reports import confusion_counts, epoch_log_append, metrics_from_counts

CLAMP_EPS = 1e-7


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 50
    patience: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvalidParamsError("learning_rate must be > 0")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise InvalidParamsError("batch_size, max_epochs, patience must be >= 1")
        if self.seed < 0:
            raise InvalidParamsError("seed must be >= 0")


@dataclass(frozen=True)
class TrainResult:
    epochs_run: int
    best_epoch: int
    best_val_loss: float
    checkpoints: tuple
    stopped_early: bool


class EarlyStopper:
    """Checkpoint-best early stopping: remembers the best validation loss
    seen so far and calls a halt once ``patience`` epochs went by with no
    new best. A plateau starting after epoch E stops training at E+patience.
    """

    def __init__(self, patience: int):
        if patience < 1:
            raise InvalidParamsError("patience must be >= 1")
        self.patience = patience
        self.best_loss = math.inf
        self.best_epoch = 0
        self.checkpoints = []

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record one epoch's validation loss; True if it set a new best."""
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.best_epoch = epoch
            self.checkpoints.append((epoch, val_loss))
            return True
        return False

    def should_stop(self, epoch: int) -> bool:
        return epoch - self.best_epoch >= self.patience


def predict_scores(model, X, batch_size: int = 32):
    """Sigmoid scores for an (n, 3, 224, 224) float32 array, clamped away
    from exact 0/1 so log-loss and open-interval consumers are safe."""
    model.eval()
    if len(X) == 0:
        return np.empty(0, dtype=np.float64)
    chunks = []
    with torch.no_grad():
        for start in range(0, len(X), batch_size):
            xb = torch.from_numpy(X[start:start + batch_size])
            chunks.append(model(xb).numpy())
    scores = np.concatenate(chunks).astype(np.float64)
    return np.clip(scores, CLAMP_EPS, 1.0 - CLAMP_EPS)


def _evaluate(model, data, batch_size: int):
    scores = predict_scores(model, data.X, batch_size)
    y = data.y.astype(np.float64)
    loss = float(-(y * np.log(scores) + (1 - y) * np.log(1 - scores)).mean())
    preds = (scores >= 0.5).astype(np.int64)
    m = metrics_from_counts(*confusion_counts(data.y, preds))
    return loss, m.accuracy, m.f1


def train_model(model, train, val, config: TrainConfig, run: int = 1, log_path=None) -> TrainResult:
    """Train the head on ``train``, early-stop on ``val`` loss, and restore
    the best-epoch head weights before returning. When ``log_path`` is given
    every epoch appends one train row and one val row to the epoch log."""
    torch.manual_seed(config.seed)
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(trainable, lr=config.learning_rate)
    Xtr = torch.from_numpy(train.X)
    ytr = torch.from_numpy(train.y.astype(np.float32))
    order_rng = torch.Generator().manual_seed(config.seed)
    stopper = EarlyStopper(config.patience)
    best_state = None
    epochs_run = 0
    stopped_early = False

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        order = torch.randperm(len(ytr), generator=order_rng)
        loss_sum = 0.0
        seen_labels, seen_preds = [], []
        for start in range(0, len(ytr), config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, yb = Xtr[idx], ytr[idx]
            optimizer.zero_grad()
            probs = model(xb)
            if not torch.isfinite(probs).all():
                raise DivergedLossError(f"non-finite scores at epoch {epoch}")
            loss = F.binary_cross_entropy(probs.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS), yb)
            if not torch.isfinite(loss):
                raise DivergedLossError(f"non-finite training loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            loss_sum += loss.item() * len(yb)
            seen_labels.append(yb.numpy())
            seen_preds.append((probs.detach().numpy() >= 0.5).astype(np.int64))
        train_loss = loss_sum / len(ytr)
        tm = metrics_from_counts(*confusion_counts(
            np.concatenate(seen_labels).astype(np.int64), np.concatenate(seen_preds)))
        val_loss, val_acc, val_f1 = _evaluate(model, val, config.batch_size)
        if not math.isfinite(val_loss):
            raise DivergedLossError(f"non-finite validation loss at epoch {epoch}")
        if log_path is not None:
            epoch_log_append(log_path, run, epoch, "train", train_loss, tm.accuracy, tm.f1)
            epoch_log_append(log_path, run, epoch, "val", val_loss, val_acc, val_f1)
        epochs_run = epoch
        if stopper.update(epoch, val_loss):
            best_state = {k: v.detach().clone() for k, v in model.head.state_dict().items()}
        if stopper.should_stop(epoch):
            stopped_early = True
            break

    if best_state is not None:
        model.head.load_state_dict(best_state)
    return TrainResult(
        epochs_run=epochs_run,
        best_epoch=stopper.best_epoch,
        best_val_loss=stopper.best_loss,
        checkpoints=tuple(stopper.checkpoints),
        stopped_early=stopped_early,
    )
