"""Command-line entry point.

Subcommands: corpus-gen, image-export, features, train, eval, scan. Options
can come from a JSON config file (--config); explicit flags win. Every
artifact is written atomically (temp file + rename). Exit codes: 0 success,
1 error; scan returns 2 when at least one scanned file is called packed.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from ._util import atomic_write_bytes
from .byteplot import BILINEAR, WidthPolicy, bytes_to_image, resize_image
from .classifiers import TRAINERS, load_model, predict_confidence, save_model
from .dataset import (
    CorpusConfig,
    build_corpus,
    random_oversample,
    read_manifest,
    stratified_split,
    write_manifest,
)
from .errors import ConfigError, PackscopeError
from .evaluation import (
    aggregate_runs,
    compute_metrics,
    confidence_report,
    confusion_from_predictions,
    write_confidence_csv,
    write_metrics_csv,
    write_predictions_csv,
)
from .gabor import (
    GaborBank,
    extract_batch,
    extract_gabor_jet,
    read_feature_csv,
    write_feature_archive,
    write_feature_csv,
)
from .rng import substream

MODEL_KIND_FLAGS = {"knn": "knn", "logreg": "logreg", "rf": "forest", "mlp": "mlp", "svm": "svm"}

_DEFAULTS = {
    "seed": 0,
    "width": "adaptive",
    "model_kind": "rf",
    "runs": 1,
    "split": "test",
    "fractions": [0.70, 0.15, 0.15],
    "image_size": "224x224",
    "corpus": {},
    "bank": {},
    "hyperparams": {},
}

_BANK_KEYS = {"frequencies", "thetas", "psi", "sigma", "gamma", "size"}
_CORPUS_KEYS = {"raw_counts", "packed_counts", "min_size", "max_size"}
_HYPERPARAM_KEYS = {
    "knn": {"k"},
    "logreg": {"learning_rate", "epochs", "l2"},
    "svm": {"c", "learning_rate", "epochs"},
    "forest": {"n_trees", "max_depth", "min_leaf", "features_per_split"},
    "mlp": {"hidden_sizes", "learning_rate", "epochs"},
}


def load_config(path, overrides: dict) -> dict:
    """Defaults <- config file <- non-None flag overrides, rejecting unknown
    keys at every level."""
    cfg = json.loads(json.dumps(_DEFAULTS))  # deep copy
    if path:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a JSON object")
        for key, value in loaded.items():
            if key not in cfg:
                raise ConfigError(f"unknown config key {key!r}")
            cfg[key] = value
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if unknown := set(cfg["bank"]) - _BANK_KEYS:
        raise ConfigError(f"unknown bank keys {sorted(unknown)}")
    if unknown := set(cfg["corpus"]) - _CORPUS_KEYS:
        raise ConfigError(f"unknown corpus keys {sorted(unknown)}")
    if cfg["model_kind"] not in MODEL_KIND_FLAGS:
        raise ConfigError(f"model_kind must be one of {sorted(MODEL_KIND_FLAGS)}")
    kind = MODEL_KIND_FLAGS[cfg["model_kind"]]
    if unknown := set(cfg["hyperparams"]) - _HYPERPARAM_KEYS[kind]:
        raise ConfigError(f"unknown {kind} hyperparameters {sorted(unknown)}")
    return cfg


def _bank(cfg: dict) -> GaborBank:
    return GaborBank(**cfg["bank"])


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PACKSCOPE_THREADS", "1")))
    except ValueError:
        return 1


def _parse_size(text: str):
    if text == "native":
        return None
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise ConfigError(f"size must be WxH or 'native', got {text!r}") from exc


def cmd_corpus_gen(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    corpus_cfg = CorpusConfig(**cfg["corpus"])
    manifest = build_corpus(corpus_cfg, cfg["seed"], args.out)
    manifest = stratified_split(manifest, tuple(cfg["fractions"]), cfg["seed"])
    write_manifest(Path(args.out) / "manifest.jsonl", manifest)
    by_label = [sum(1 for s in manifest.samples if s.label == v) for v in (0, 1)]
    print(f"corpus: {len(manifest.samples)} samples ({by_label[1]} packed, {by_label[0]} non-packed) at {args.out}")
    return 0


def cmd_image_export(args) -> int:
    cfg = load_config(args.config, {"width": args.width, "image_size": args.size})
    manifest = read_manifest(args.manifest)
    policy = WidthPolicy.parse(cfg["width"])
    size = _parse_size(cfg["image_size"])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for sample in manifest.samples:
        img = bytes_to_image(manifest.resolve(sample).read_bytes(), policy)
        if size is not None:
            img = resize_image(img, size[0], size[1], BILINEAR)
        buf = io.BytesIO()
        Image.fromarray(np.asarray(img.pixels), mode="L").save(buf, format="PNG")
        atomic_write_bytes(out_dir / f"{sample.id}.png", buf.getvalue())
    print(f"exported {len(manifest.samples)} images to {out_dir}")
    return 0


def cmd_features(args) -> int:
    cfg = load_config(args.config, {"width": args.width})
    manifest = read_manifest(args.manifest)
    bank = _bank(cfg)
    policy = WidthPolicy.parse(cfg["width"])
    table, errors = extract_batch(manifest.rows(), bank, policy, threads=_threads())
    for sid, msg in errors:
        print(f"warning: {sid}: {msg}", file=sys.stderr)
    out = Path(args.out)
    write_feature_csv(out.with_suffix(".csv"), table, bank)
    write_feature_archive(out.with_suffix(".psfa"), table)
    print(f"features: {len(table.ids)} rows x {table.X.shape[1]} -> {out.with_suffix('.csv')}, {out.with_suffix('.psfa')}")
    return 0 if not errors else 1


def _split_rows(table, manifest_path, wanted: str):
    manifest = read_manifest(manifest_path)
    split_of = {s.id: s.split for s in manifest.samples}
    missing = [sid for sid in table.ids if sid not in split_of]
    if missing:
        raise ConfigError(f"{len(missing)} feature rows not in manifest (first: {missing[0]})")
    keep = [i for i, sid in enumerate(table.ids) if split_of[sid] == wanted]
    return keep


def _train_one(kind: str, X, y, hyperparams: dict, seed: int):
    kwargs = dict(hyperparams)
    if kind in ("forest", "mlp"):
        kwargs["seed"] = seed
    return TRAINERS[kind](X, y, **kwargs)


def cmd_train(args) -> int:
    cfg = load_config(
        args.config,
        {"seed": args.seed, "model_kind": args.model_kind, "runs": args.runs},
    )
    kind = MODEL_KIND_FLAGS[cfg["model_kind"]]
    table = read_feature_csv(args.features)
    train_idx = _split_rows(table, args.manifest, "train")
    if not train_idx:
        raise ConfigError("no rows with split=train; run corpus-gen first")
    Xtr = table.X[train_idx]
    ytr = table.labels[train_idx]

    val_idx = _split_rows(table, args.manifest, "val")
    runs = int(cfg["runs"])
    per_run = []
    for run in range(1, runs + 1):
        run_seed = substream(cfg["seed"], f"run:{run}")
        ros = random_oversample(ytr, run_seed)
        model = _train_one(kind, Xtr[ros], ytr[ros], cfg["hyperparams"], run_seed)
        if run == 1:
            save_model(model, args.out)
        if runs > 1 and val_idx:
            scores = predict_confidence(model, table.X[val_idx])
            preds = (scores >= 0.5).astype(int)
            cm = confusion_from_predictions(list(zip(table.labels[val_idx].tolist(), preds.tolist())))
            per_run.append(compute_metrics(cm))
    print(f"trained {kind} on {len(ytr)} rows (ROS to {max(np.bincount(ytr)) * 2}) -> {args.out}")
    if per_run:
        report = aggregate_runs(per_run)
        report_path = Path(str(args.out) + ".runs.csv")
        write_metrics_csv(report_path, kind, report)
        print(
            f"{runs} runs on val: accuracy {report.mean['accuracy']:.4f}"
            f"±{report.std['accuracy']:.4f} -> {report_path}"
        )
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args.config, {"split": args.split})
    model = load_model(args.model)
    table = read_feature_csv(args.features)
    keep = _split_rows(table, args.manifest, cfg["split"])
    if not keep:
        raise ConfigError(f"no rows with split={cfg['split']}")
    ids = [table.ids[i] for i in keep]
    y = table.labels[keep]
    scores = predict_confidence(model, table.X[keep])
    preds = (scores >= 0.5).astype(int)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_predictions_csv(out_dir / "predictions.csv", ids, y, preds, scores)
    cm = confusion_from_predictions(list(zip(y.tolist(), preds.tolist())))
    metrics = compute_metrics(cm)
    write_metrics_csv(out_dir / "metrics.csv", model.kind, aggregate_runs([metrics]))
    write_confidence_csv(out_dir / "confidence.csv", confidence_report(zip(y.tolist(), scores.tolist())))
    print(
        f"eval[{cfg['split']}] n={len(ids)} tp={cm.tp} fp={cm.fp} tn={cm.tn} fn={cm.fn} "
        f"accuracy={metrics.accuracy:.4f} f1={metrics.f1:.4f} -> {out_dir}"
    )
    return 0


def cmd_scan(args) -> int:
    cfg = load_config(args.config, {"width": args.width})
    model = load_model(args.model)
    bank = _bank(cfg)
    policy = WidthPolicy.parse(cfg["width"])
    any_packed = False
    for name in args.files:
        data = Path(name).read_bytes()
        img = bytes_to_image(data, policy)
        score = predict_confidence(model, extract_gabor_jet(img, bank))
        verdict = "packed" if score >= 0.5 else "non-packed"
        any_packed = any_packed or verdict == "packed"
        print(f"{name},{verdict},{score:.6f}")
    return 2 if any_packed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="packscope",
        description="Packed-executable detection: byte-plot images, Gabor texture features, classical classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        p.add_argument("--config", help="JSON config file; explicit flags win")
        if "seed" in flags:
            p.add_argument("--seed", type=int)
        if "width" in flags:
            p.add_argument("--width", help="fixed:N or adaptive")

    p = sub.add_parser("corpus-gen", help="generate the synthetic corpus and write its manifest")
    common(p, "seed")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.set_defaults(func=cmd_corpus_gen)

    p = sub.add_parser("image-export", help="render manifest samples to grayscale PNGs")
    common(p, "width")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--size", help="WxH (default 224x224) or 'native'")
    p.set_defaults(func=cmd_image_export)

    p = sub.add_parser("features", help="extract texture features for every manifest sample")
    common(p, "width")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, help="output prefix; writes <out>.csv and <out>.psfa")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train a classifier on the train split (with oversampling)")
    common(p, "seed")
    p.add_argument("features", help="feature CSV from the features command")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="model file path")
    p.add_argument("--model-kind", choices=sorted(MODEL_KIND_FLAGS))
    p.add_argument("--runs", type=int, help="repeat training with derived seeds; writes <out>.runs.csv")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on one manifest split")
    common(p)
    p.add_argument("model")
    p.add_argument("--features", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", choices=["train", "val", "test", "holdout"])
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scan", help="classify arbitrary files as packed or non-packed")
    common(p, "width")
    p.add_argument("model")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PackscopeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
