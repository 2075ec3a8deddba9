"""Metrics and CSV reports, format-compatible with the byte-plot pipeline's
evaluation tooling so its readers and comparison scripts work unchanged.

Formats:
    predictions CSV id,label,pred,score              (score %.9g)
    metrics CSV     model,run,accuracy,precision,recall,f1,fpr,fnr
                    with a final aggregate row whose run column is MEAN±STD
    epoch log CSV   run,epoch,split,loss,accuracy,f1 (append-only)

Positive class is "packed" (label 1). Ratios with a zero denominator are
reported as 0.0 rather than NaN so degenerate smoke-test splits stay
analyzable.
"""

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParamsError

METRIC_FIELDS = ("accuracy", "precision", "recall", "f1", "fpr", "fnr")


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    fpr: float
    fnr: float


@dataclass(frozen=True)
class RunReport:
    """Per-run metrics plus mean, sample standard deviation (n-1), and the
    95% normal-approximation half-width 1.96*sigma/sqrt(n), per metric."""

    runs: tuple
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    ci95: dict = field(default_factory=dict)


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def confusion_counts(labels, preds):
    """Count (tp, fp, tn, fn) over parallel 0/1 arrays."""
    labels = np.asarray(labels)
    preds = np.asarray(preds)
    if labels.shape != preds.shape or labels.size == 0:
        raise InvalidParamsError("labels and preds must be equal-length and non-empty")
    tp = int(np.sum((labels == 1) & (preds == 1)))
    fp = int(np.sum((labels == 0) & (preds == 1)))
    tn = int(np.sum((labels == 0) & (preds == 0)))
    fn = int(np.sum((labels == 1) & (preds == 0)))
    return tp, fp, tn, fn


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def metrics_from_counts(tp: int, fp: int, tn: int, fn: int) -> Metrics:
    total = tp + fp + tn + fn
    if total == 0:
        raise InvalidParamsError("confusion counts are all zero")
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(
        accuracy=(tp + tn) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        fpr=_ratio(fp, fp + tn),
        fnr=_ratio(fn, fn + tp),
    )


def aggregate_runs(reports) -> RunReport:
    runs = tuple(reports)
    if not runs:
        raise InvalidParamsError("no runs to aggregate")
    mean, std, ci95 = {}, {}, {}
    n = len(runs)
    for name in METRIC_FIELDS:
        vals = np.array([getattr(r, name) for r in runs], dtype=np.float64)
        mean[name] = float(vals.mean())
        std[name] = float(vals.std(ddof=1)) if n > 1 else 0.0
        ci95[name] = 1.96 * std[name] / math.sqrt(n)
    return RunReport(runs=runs, mean=mean, std=std, ci95=ci95)


def write_predictions_csv(path, ids, labels, preds, scores) -> None:
    lines = ["id,label,pred,score"]
    for sid, y, p, s in zip(ids, labels, preds, scores):
        lines.append(f"{sid},{int(y)},{int(p)},{s:.9g}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_metrics_csv(path, model_name: str, report: RunReport) -> None:
    lines = ["model,run,accuracy,precision,recall,f1,fpr,fnr"]
    for i, m in enumerate(report.runs, start=1):
        cells = ",".join(f"{getattr(m, f):.6f}" for f in METRIC_FIELDS)
        lines.append(f"{model_name},{i},{cells}")
    agg = ",".join(f"{report.mean[f]:.6f}±{report.std[f]:.6f}" for f in METRIC_FIELDS)
    lines.append(f"{model_name},MEAN±STD,{agg}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


EPOCH_LOG_HEADER = "run,epoch,split,loss,accuracy,f1"


def epoch_log_append(path, run: int, epoch: int, split: str, loss: float, accuracy: float, f1: float) -> None:
    """Append one row to the per-epoch training log, creating the file (and
    header) on first use. Single-writer: no cross-process locking."""
    if split not in ("train", "val"):
        raise InvalidParamsError(f"split must be train or val, got {split!r}")
    line = f"{run},{epoch},{split},{loss:.9g},{accuracy:.9g},{f1:.9g}\n"
    with open(path, "a", encoding="utf-8") as fh:
        if fh.tell() == 0:
            fh.write(EPOCH_LOG_HEADER + "\n")
        fh.write(line)
