"""Command-line trainer: fit a frozen-backbone CNN head on an exported
byte-plot image corpus and write evaluation reports.

Inputs are the corpus manifest (JSON-lines) and a directory of 224x224
grayscale PNGs named {id}.png. Outputs land in --out:

    epochs.csv              per-epoch train/val log, all runs
    predictions_run{N}.csv  test-split predictions for run N
    metrics.csv             per-run metrics plus MEAN±STD aggregate
"""

import argparse
import sys
from pathlib import Path

from .data import load_split
from .errors import CnnTrainerError
from .manifest import read_manifest
from .model import BACKBONES, HeadConfig, build_model
from .reports import (
    aggregate_runs,
    confusion_counts,
    metrics_from_counts,
    write_metrics_csv,
    write_predictions_csv,
)
from .training import TrainConfig, predict_scores, train_model


def run_training(args) -> None:
    import torch

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus_seed, samples = read_manifest(args.manifest)
    print(f"manifest: {len(samples)} samples (corpus seed {corpus_seed})")

    train = load_split(samples, args.images, "train", balance=True)
    val = load_split(samples, args.images, "val")
    test = load_split(samples, args.images, "test")
    print(f"splits: train {len(train.y)} (balanced), val {len(val.y)}, test {len(test.y)}")

    weights = None if args.weights == "none" else "imagenet"
    log_path = out_dir / "epochs.csv"
    log_path.unlink(missing_ok=True)
    per_run = []
    for run in range(1, args.runs + 1):
        run_seed = args.seed + run - 1
        torch.manual_seed(run_seed)
        model, census = build_model(HeadConfig(backbone=args.backbone, weights=weights))
        if run == 1:
            print(f"{args.backbone}: {census.total:,} params "
                  f"({census.trainable:,} trainable, {census.non_trainable:,} frozen)")
        config = TrainConfig(learning_rate=args.lr, batch_size=args.batch_size,
                             max_epochs=args.epochs, patience=args.patience, seed=run_seed)
        result = train_model(model, train, val, config, run=run, log_path=log_path)
        scores = predict_scores(model, test.X, args.batch_size)
        preds = (scores >= 0.5).astype(int)
        m = metrics_from_counts(*confusion_counts(test.y, preds))
        per_run.append(m)
        write_predictions_csv(out_dir / f"predictions_run{run}.csv", test.ids, test.y, preds, scores)
        stop = "early stop" if result.stopped_early else "epoch cap"
        print(f"run {run}: {result.epochs_run} epochs ({stop}; best val loss "
              f"{result.best_val_loss:.6f} @ epoch {result.best_epoch}), "
              f"test acc {m.accuracy:.4f} f1 {m.f1:.4f}")
    write_metrics_csv(out_dir / "metrics.csv", args.backbone, aggregate_runs(per_run))
    print(f"reports: {out_dir / 'metrics.csv'}, {log_path}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="train-cnn",
        description="train a frozen-backbone CNN classifier on byte-plot images",
    )
    p.add_argument("--backbone", required=True, choices=list(BACKBONES))
    p.add_argument("--manifest", required=True, help="corpus manifest (JSON-lines)")
    p.add_argument("--images", required=True, help="directory of exported {id}.png images")
    p.add_argument("--out", required=True, help="output directory for CSV reports")
    p.add_argument("--runs", type=int, default=1, help="independent training runs (seeds seed..seed+runs-1)")
    p.add_argument("--epochs", type=int, default=50, help="epoch cap per run")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--patience", type=int, default=5, help="early-stopping patience in epochs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", choices=["none", "imagenet"], default="none",
                   help="backbone initialization; imagenet loads pretrained weights")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.runs < 1:
        print("error: --runs must be >= 1", file=sys.stderr)
        return 1
    try:
        run_training(args)
    except (CnnTrainerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
