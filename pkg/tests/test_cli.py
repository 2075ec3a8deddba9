"""End-to-end CLI flows: corpus-gen, features, image-export, train, eval, scan."""

import hashlib
import json

import pytest
from PIL import Image

from packscope.classifiers import load_model
from packscope.cli import main
from packscope.dataset import read_manifest
from packscope.evaluation import read_predictions_csv
from packscope.gabor import read_feature_csv

CORPUS_CFG = {
    "raw_counts": {"code": 4, "text": 4, "mixed": 4, "sparse": 4},
    "packed_counts": {"A": 6, "B": 4, "C": 4},
    "min_size": 2048,
    "max_size": 4096,
}


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Corpus + features + trained model, built once through the CLI."""
    root = tmp_path_factory.mktemp("cli_ws")
    config = root / "config.json"
    config.write_text(json.dumps({"corpus": CORPUS_CFG}))

    assert main(["corpus-gen", "--config", str(config), "--seed", "3", "--out", str(root / "corpus")]) == 0
    manifest = root / "corpus" / "manifest.jsonl"
    assert main(["features", "--config", str(config), str(manifest), "--out", str(root / "feats")]) == 0
    assert main([
        "train", str(root / "feats.csv"), "--manifest", str(manifest),
        "--out", str(root / "model.psmd"), "--model-kind", "rf", "--seed", "3",
    ]) == 0
    return {"root": root, "config": config, "manifest": manifest}


class TestCorpusGen:
    def test_deterministic_manifest_hash(self, tmp_path, workspace):
        cfg = workspace["config"]
        for out in ("one", "two"):
            assert main(["corpus-gen", "--config", str(cfg), "--seed", "9", "--out", str(tmp_path / out)]) == 0
        digests = [
            hashlib.sha256((tmp_path / out / "manifest.jsonl").read_bytes()).hexdigest()
            for out in ("one", "two")
        ]
        assert digests[0] == digests[1]

    def test_counts_and_splits(self, workspace):
        manifest = read_manifest(workspace["manifest"])
        assert len(manifest.samples) == 30
        assert sum(s.label for s in manifest.samples) == 14
        holdout = [s for s in manifest.samples if s.split == "holdout"]
        assert len(holdout) == 4
        assert all(s.variant == "tpk-C" for s in holdout)

    def test_flag_overrides_config_seed(self, tmp_path, workspace):
        seeded_cfg = tmp_path / "seeded.json"
        seeded_cfg.write_text(json.dumps({"seed": 1, "corpus": CORPUS_CFG}))
        assert main(["corpus-gen", "--config", str(seeded_cfg), "--seed", "9", "--out", str(tmp_path / "flag")]) == 0
        assert main(["corpus-gen", "--config", str(workspace["config"]), "--seed", "9", "--out", str(tmp_path / "base")]) == 0
        assert (tmp_path / "flag" / "manifest.jsonl").read_bytes() == (
            tmp_path / "base" / "manifest.jsonl"
        ).read_bytes()

    def test_rejects_unknown_config_key(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"corpus": CORPUS_CFG, "tempo": 120}))
        assert main(["corpus-gen", "--config", str(bad), "--out", str(tmp_path / "x")]) == 1
        assert "unknown config key" in capsys.readouterr().err

    def test_rejects_unknown_corpus_key(self, tmp_path, capsys):
        bad = tmp_path / "bad2.json"
        bad.write_text(json.dumps({"corpus": {"flavor": "mild"}}))
        assert main(["corpus-gen", "--config", str(bad), "--out", str(tmp_path / "x")]) == 1
        assert "unknown corpus keys" in capsys.readouterr().err


class TestFeatures:
    def test_outputs_parse(self, workspace):
        root = workspace["root"]
        table = read_feature_csv(root / "feats.csv")
        assert len(table.ids) == 30
        assert table.X.shape == (30, 24)
        assert (root / "feats.psfa").is_file()

    def test_thread_count_does_not_change_output(self, workspace, tmp_path, monkeypatch):
        monkeypatch.setenv("PACKSCOPE_THREADS", "3")
        assert main([
            "features", "--config", str(workspace["config"]),
            str(workspace["manifest"]), "--out", str(tmp_path / "t3"),
        ]) == 0
        serial = (workspace["root"] / "feats.csv").read_bytes()
        assert (tmp_path / "t3.csv").read_bytes() == serial


class TestImageExport:
    def test_default_export_is_224_grayscale(self, workspace, tmp_path):
        out = tmp_path / "imgs"
        assert main([
            "image-export", "--config", str(workspace["config"]),
            str(workspace["manifest"]), "--out", str(out),
        ]) == 0
        pngs = sorted(out.glob("*.png"))
        assert len(pngs) == 30
        with Image.open(pngs[0]) as im:
            assert im.size == (224, 224)
            assert im.mode == "L"

    def test_native_size_export(self, workspace, tmp_path):
        out = tmp_path / "native"
        assert main([
            "image-export", "--config", str(workspace["config"]),
            str(workspace["manifest"]), "--out", str(out), "--size", "native",
        ]) == 0
        sample = read_manifest(workspace["manifest"]).samples[0]
        with Image.open(out / f"{sample.id}.png") as im:
            # adaptive width puts 2-4 KiB files at 32 columns
            assert im.size[0] == 32


class TestTrain:
    def test_model_kind_rf_maps_to_forest(self, workspace):
        model = load_model(workspace["root"] / "model.psmd")
        assert model.kind == "forest"

    def test_multi_run_report(self, workspace, tmp_path):
        out = tmp_path / "m.psmd"
        assert main([
            "train", str(workspace["root"] / "feats.csv"),
            "--manifest", str(workspace["manifest"]),
            "--out", str(out), "--model-kind", "logreg", "--seed", "4", "--runs", "2",
        ]) == 0
        report = (tmp_path / "m.psmd.runs.csv").read_text().splitlines()
        assert report[0] == "model,run,accuracy,precision,recall,f1,fpr,fnr"
        assert len(report) == 4  # 2 runs + aggregate
        assert report[-1].split(",")[1] == "MEAN±STD"

    def test_rejects_unknown_hyperparameter(self, workspace, tmp_path, capsys):
        bad = tmp_path / "hp.json"
        bad.write_text(json.dumps({"model_kind": "knn", "hyperparams": {"depth": 3}}))
        code = main([
            "train", str(workspace["root"] / "feats.csv"),
            "--manifest", str(workspace["manifest"]),
            "--out", str(tmp_path / "x.psmd"), "--config", str(bad),
        ])
        assert code == 1
        assert "hyperparameters" in capsys.readouterr().err

    def test_hyperparameters_apply(self, workspace, tmp_path):
        cfg = tmp_path / "knn.json"
        cfg.write_text(json.dumps({"model_kind": "knn", "hyperparams": {"k": 3}}))
        out = tmp_path / "knn.psmd"
        assert main([
            "train", str(workspace["root"] / "feats.csv"),
            "--manifest", str(workspace["manifest"]),
            "--out", str(out), "--config", str(cfg), "--seed", "4",
        ]) == 0
        assert load_model(out).k == 3


class TestEval:
    def test_reports_written(self, workspace, tmp_path, capsys):
        out = tmp_path / "reports"
        assert main([
            "eval", str(workspace["root"] / "model.psmd"),
            "--features", str(workspace["root"] / "feats.csv"),
            "--manifest", str(workspace["manifest"]),
            "--split", "test", "--out", str(out),
        ]) == 0
        ids, labels, preds, scores = read_predictions_csv(out / "predictions.csv")
        assert len(ids) > 0
        assert (out / "metrics.csv").is_file()
        assert (out / "confidence.csv").is_file()
        assert "eval[test]" in capsys.readouterr().out

    def test_holdout_split(self, workspace, tmp_path):
        out = tmp_path / "holdout"
        assert main([
            "eval", str(workspace["root"] / "model.psmd"),
            "--features", str(workspace["root"] / "feats.csv"),
            "--manifest", str(workspace["manifest"]),
            "--split", "holdout", "--out", str(out),
        ]) == 0
        ids, labels, _, _ = read_predictions_csv(out / "predictions.csv")
        assert len(ids) == 4
        assert set(labels.tolist()) == {1}


class TestScan:
    def _file_of(self, workspace, variant: str):
        manifest = read_manifest(workspace["manifest"])
        sample = next(s for s in manifest.samples if s.variant == variant)
        return manifest.resolve(sample)

    def test_packed_file_exits_2(self, workspace, capsys):
        target = self._file_of(workspace, "tpk-A")
        code = main(["scan", str(workspace["root"] / "model.psmd"), str(target)])
        out = capsys.readouterr().out
        assert code == 2
        assert ",packed," in out

    def test_clean_file_exits_0(self, workspace, capsys):
        target = self._file_of(workspace, "raw-text")
        code = main(["scan", str(workspace["root"] / "model.psmd"), str(target)])
        out = capsys.readouterr().out
        assert code == 0
        assert ",non-packed," in out

    def test_missing_file_exits_1(self, workspace, tmp_path, capsys):
        code = main(["scan", str(workspace["root"] / "model.psmd"), str(tmp_path / "ghost.bin")])
        assert code == 1
        assert "error:" in capsys.readouterr().err
