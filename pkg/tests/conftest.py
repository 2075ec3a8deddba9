"""Shared fixtures: reference corpus (session-scoped, built once) and a
compact corpus for fast integration tests."""

import time
from dataclasses import dataclass
from pathlib import Path

import pytest

from packscope.dataset import (
    CorpusConfig,
    Manifest,
    build_corpus,
    stratified_split,
    write_manifest,
)
from packscope.gabor import FeatureTable, extract_batch
from suite_settings import REFERENCE_SEED, SMALL_CONFIG


@dataclass
class TimedCorpus:
    manifest: Manifest
    root: Path
    build_seconds: float


@dataclass
class TimedFeatures:
    table: FeatureTable
    extract_seconds: float


@pytest.fixture(scope="session")
def reference_corpus(tmp_path_factory):
    """The full-size corpus: 400 packed (A+B) + 400 non-packed +
    100 variant-C holdout, split 70/15/15.  Build time is recorded so
    downstream tests can account for it in pipeline runtime budgets."""
    root = tmp_path_factory.mktemp("reference_corpus")
    t0 = time.perf_counter()
    manifest = build_corpus(CorpusConfig(), REFERENCE_SEED, root)
    manifest = stratified_split(manifest, (0.70, 0.15, 0.15), REFERENCE_SEED)
    write_manifest(root / "manifest.jsonl", manifest)
    return TimedCorpus(manifest, root, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def reference_features(reference_corpus):
    t0 = time.perf_counter()
    table, errors = extract_batch(reference_corpus.manifest.rows())
    assert not errors
    return TimedFeatures(table, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("small_corpus")
    manifest = build_corpus(SMALL_CONFIG, 5, root)
    manifest = stratified_split(manifest, (0.70, 0.15, 0.15), 5)
    write_manifest(root / "manifest.jsonl", manifest)
    return manifest
