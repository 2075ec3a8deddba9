"""Metric suite, multi-run aggregation, and reporting exports.

Positive class is "packed" (label 1). Ratios with a zero denominator are
reported as 0 and flagged in ``Metrics.undefined`` instead of raising or
propagating NaN, so degenerate smoke-test splits stay analyzable.

Report formats:
    metrics CSV     model,run,accuracy,precision,recall,f1,fpr,fnr
                    with a final aggregate row whose run column is MEAN±STD
    confidence CSV  bucket_lo,bucket_hi,correct,incorrect
    predictions CSV id,label,pred,score
    epoch log CSV   run,epoch,split,loss,accuracy,f1 (append-only)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._util import atomic_write_text
from .errors import (
    EmptyInputError,
    EmptyMatrixError,
    FormatError,
    InvalidParamsError,
    NonBinaryValueError,
    ScoreOutOfRangeError,
)

METRIC_FIELDS = ("accuracy", "precision", "recall", "f1", "fpr", "fnr")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidParamsError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    fpr: float
    fnr: float
    undefined: frozenset = frozenset()

    def values(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_FIELDS}


@dataclass(frozen=True)
class RunReport:
    """Per-run metrics plus mean, sample standard deviation (n-1), and the
    95% normal-approximation half-width 1.96*sigma/sqrt(n), per metric."""

    runs: tuple
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    ci95: dict = field(default_factory=dict)


def confusion_from_predictions(rows) -> ConfusionMatrix:
    rows = list(rows)
    if not rows:
        raise EmptyInputError("no prediction rows")
    tp = fp = tn = fn = 0
    for label, pred in rows:
        if label not in (0, 1) or pred not in (0, 1):
            raise NonBinaryValueError(f"labels and predictions must be 0/1, got ({label}, {pred})")
        if label == 1:
            tp += pred == 1
            fn += pred == 0
        else:
            tn += pred == 0
            fp += pred == 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: int, den: int, name: str, undefined: set) -> float:
    if den == 0:
        undefined.add(name)
        return 0.0
    return num / den


def compute_metrics(cm: ConfusionMatrix) -> Metrics:
    if cm.total == 0:
        raise EmptyMatrixError("confusion matrix has no counts")
    undefined: set = set()
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", undefined)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", undefined)
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        undefined.add("f1")
        f1 = 0.0
    return Metrics(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision=precision,
        recall=recall,
        f1=f1,
        fpr=_ratio(cm.fp, cm.fp + cm.tn, "fpr", undefined),
        fnr=_ratio(cm.fn, cm.fn + cm.tp, "fnr", undefined),
        undefined=frozenset(undefined),
    )


def aggregate_runs(reports) -> RunReport:
    runs = tuple(reports)
    if not runs:
        raise EmptyInputError("no runs to aggregate")
    mean, std, ci95 = {}, {}, {}
    n = len(runs)
    for name in METRIC_FIELDS:
        vals = np.array([getattr(r, name) for r in runs], dtype=np.float64)
        mean[name] = float(vals.mean())
        std[name] = float(vals.std(ddof=1)) if n > 1 else 0.0
        ci95[name] = 1.96 * std[name] / math.sqrt(n)
    return RunReport(runs=runs, mean=mean, std=std, ci95=ci95)


def confidence_report(rows, edges=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)):
    """Bucket (label, score) rows by score, split by correctness at the 0.5
    decision threshold. Buckets are [lo, hi) except the last, which is
    closed. Returns a list of (lo, hi, correct, incorrect)."""
    edges = [float(e) for e in edges]
    if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise InvalidParamsError("bucket edges must be strictly increasing, >= 2 of them")
    counts = [[0, 0] for _ in range(len(edges) - 1)]
    for label, score in rows:
        if not (0.0 <= score <= 1.0) or not math.isfinite(score):
            raise ScoreOutOfRangeError(f"score {score} outside [0, 1]")
        if score < edges[0] or score > edges[-1]:
            continue
        b = len(edges) - 2 if score >= edges[-2] else None
        if b is None:
            for i in range(len(edges) - 1):
                if edges[i] <= score < edges[i + 1]:
                    b = i
                    break
        if b is None:
            continue
        correct = int(score >= 0.5) == label
        counts[b][0 if correct else 1] += 1
    return [(edges[i], edges[i + 1], c, w) for i, (c, w) in enumerate(counts)]


def write_confidence_csv(path, buckets) -> None:
    lines = ["bucket_lo,bucket_hi,correct,incorrect"]
    for lo, hi, c, w in buckets:
        lines.append(f"{lo:g},{hi:g},{c},{w}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_predictions_csv(path, ids, labels, preds, scores) -> None:
    lines = ["id,label,pred,score"]
    for sid, y, p, s in zip(ids, labels, preds, scores):
        lines.append(f"{sid},{int(y)},{int(p)},{s:.9g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_predictions_csv(path):
    """Returns (ids, labels, preds, scores); scores as float64."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "id,label,pred,score":
        raise FormatError(f"{path}: missing predictions header")
    ids, labels, preds, scores = [], [], [], []
    for ln in lines[1:]:
        if not ln:
            continue
        sid, y, p, s = ln.split(",")
        ids.append(sid)
        labels.append(int(y))
        preds.append(int(p))
        scores.append(float(s))
    return ids, np.array(labels), np.array(preds), np.array(scores, dtype=np.float64)


def write_metrics_csv(path, model_name: str, report: RunReport) -> None:
    lines = ["model,run,accuracy,precision,recall,f1,fpr,fnr"]
    for i, m in enumerate(report.runs, start=1):
        cells = ",".join(f"{getattr(m, f):.6f}" for f in METRIC_FIELDS)
        lines.append(f"{model_name},{i},{cells}")
    agg = ",".join(f"{report.mean[f]:.6f}±{report.std[f]:.6f}" for f in METRIC_FIELDS)
    lines.append(f"{model_name},MEAN±STD,{agg}")
    atomic_write_text(path, "\n".join(lines) + "\n")


EPOCH_LOG_HEADER = "run,epoch,split,loss,accuracy,f1"


def epoch_log_append(path, run: int, epoch: int, split: str, loss: float, accuracy: float, f1: float) -> None:
    """Append one row to the per-epoch training log, creating the file (and
    header) on first use. Single-writer: no cross-process locking."""
    if split not in ("train", "val"):
        raise InvalidParamsError(f"split must be train or val, got {split!r}")
    path = Path(path)
    line = f"{run},{epoch},{split},{loss:.9g},{accuracy:.9g},{f1:.9g}\n"
    with open(path, "a", encoding="utf-8") as fh:
        if fh.tell() == 0:
            fh.write(EPOCH_LOG_HEADER + "\n")
        fh.write(line)


def read_epoch_log(path):
    """Parse the epoch log back into a list of (run, epoch, split, loss,
    accuracy, f1) tuples."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != EPOCH_LOG_HEADER:
        raise FormatError(f"{path}: missing epoch log header")
    out = []
    for ln in lines[1:]:
        if not ln:
            continue
        run, epoch, split, loss, acc, f1 = ln.split(",")
        out.append((int(run), int(epoch), split, float(loss), float(acc), float(f1)))
    return out
