"""Shared fixtures: a small corpus built and exported entirely through the
producer's command-line interface, so the trainer is tested against the real
manifest and image file contracts rather than hand-made stand-ins."""

import json
import subprocess
from dataclasses import dataclass
from pathlib import Path

import pytest

CORPUS_SEED = 7
CORPUS_CONFIG = {
    "corpus": {
        "raw_counts": {"code": 8, "text": 8, "mixed": 7, "sparse": 7},
        "packed_counts": {"A": 16, "B": 8, "C": 6},
        "min_size": 2048,
        "max_size": 8192,
    }
}


@dataclass(frozen=True)
class ExportedCorpus:
    manifest: Path
    images: Path


def _run_cli(argv) -> None:
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"{argv[0]} failed:\n{proc.stdout}\n{proc.stderr}")


@pytest.fixture(scope="session")
def exported_corpus(tmp_path_factory) -> ExportedCorpus:
    """60-sample corpus (30 packed, 30 non-packed) with 224x224 PNG exports."""
    root = tmp_path_factory.mktemp("corpus")
    config = root / "config.json"
    config.write_text(json.dumps(CORPUS_CONFIG), encoding="utf-8")
    _run_cli(["packscope", "corpus-gen", "--out", str(root / "corpus"),
              "--seed", str(CORPUS_SEED), "--config", str(config)])
    manifest = root / "corpus" / "manifest.jsonl"
    images = root / "images"
    _run_cli(["packscope", "image-export", str(manifest), "--out", str(images),
              "--size", "224x224"])
    return ExportedCorpus(manifest=manifest, images=images)
