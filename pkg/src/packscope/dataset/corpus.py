"""Corpus construction, manifest IO, stratified splitting, oversampling.

The manifest is JSON-lines: a header object `{"version":1,"seed":<u64>}`
followed by one object per sample with keys `id, path, label, variant, len,
split`. Paths are relative to the manifest's directory. Sample ids embed the
variant tag and a per-variant counter, so re-running the same config and seed
reproduces the manifest byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .._util import atomic_write_text
from ..errors import (
    ClassTooSmallError,
    FormatError,
    InvalidParamsError,
    SingleClassInputError,
    VersionMismatchError,
)
from ..rng import Xorshift64Star, substream
from .synth import generate_synthetic_binary
from .toypack import PackSpec, toy_pack

MANIFEST_VERSION = 1

SPLITS = ("train", "val", "test", "holdout", "unassigned")
RAW_VARIANTS = ("raw-code", "raw-text", "raw-mixed", "raw-sparse")
PACKED_VARIANTS = ("tpk-A", "tpk-B", "tpk-C")

DEFAULT_MIN_SIZE = 16 * 1024
DEFAULT_MAX_SIZE = 256 * 1024


@dataclass(frozen=True)
class Sample:
    id: str
    path: str
    label: int
    variant: str
    len: int
    split: str = "unassigned"

    def __post_init__(self):
        if self.label not in (0, 1):
            raise InvalidParamsError(f"label must be 0 or 1, got {self.label}")
        if self.split not in SPLITS:
            raise InvalidParamsError(f"unknown split {self.split!r}")
        if (self.label == 1) != self.variant.startswith("tpk-"):
            raise InvalidParamsError(
                f"label {self.label} inconsistent with variant {self.variant!r}"
            )


@dataclass
class Manifest:
    seed: int
    samples: list
    version: int = MANIFEST_VERSION
    root: Path | None = None  # directory the paths are relative to

    def __post_init__(self):
        ids = [s.id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise InvalidParamsError("duplicate sample ids in manifest")

    def resolve(self, sample: Sample) -> Path:
        base = self.root if self.root is not None else Path(".")
        return base / sample.path

    def rows(self):
        """Samples with absolute paths, for feature extraction."""
        return [replace(s, path=str(self.resolve(s))) for s in self.samples]

    def by_split(self, split: str) -> list:
        return [s for s in self.samples if s.split == split]


def write_manifest(path, manifest: Manifest) -> None:
    lines = [json.dumps({"version": manifest.version, "seed": manifest.seed}, separators=(",", ":"))]
    for s in manifest.samples:
        lines.append(
            json.dumps(
                {
                    "id": s.id,
                    "path": s.path,
                    "label": s.label,
                    "variant": s.variant,
                    "len": s.len,
                    "split": s.split,
                },
                separators=(",", ":"),
            )
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path) -> Manifest:
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln]
    if not lines:
        raise FormatError(f"{path}: empty manifest")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: bad manifest header") from exc
    version = header.get("version")
    if version != MANIFEST_VERSION:
        raise VersionMismatchError(f"{path}: manifest version {version}, expected {MANIFEST_VERSION}")
    samples = []
    for ln in lines[1:]:
        try:
            row = json.loads(ln)
            samples.append(
                Sample(
                    id=row["id"],
                    path=row["path"],
                    label=int(row["label"]),
                    variant=row["variant"],
                    len=int(row["len"]),
                    split=row["split"],
                )
            )
        except (json.JSONDecodeError, KeyError) as exc:
            raise FormatError(f"{path}: bad manifest row: {ln[:80]}") from exc
    return Manifest(seed=int(header["seed"]), samples=samples, root=path.parent)


@dataclass(frozen=True)
class CorpusConfig:
    """Counts per non-packed kind and per packer variant, plus the size band.

    Sizes are drawn log-uniformly from [min_size, max_size].
    """

    raw_counts: dict = field(default_factory=lambda: {"code": 100, "text": 100, "mixed": 100, "sparse": 100})
    packed_counts: dict = field(default_factory=lambda: {"A": 200, "B": 200, "C": 100})
    min_size: int = DEFAULT_MIN_SIZE
    max_size: int = DEFAULT_MAX_SIZE

    def __post_init__(self):
        for kind in self.raw_counts:
            if kind not in ("code", "text", "mixed", "sparse"):
                raise InvalidParamsError(f"unknown content kind {kind!r}")
        for variant in self.packed_counts:
            if variant not in ("A", "B", "C"):
                raise InvalidParamsError(f"unknown packer variant {variant!r}")
        if not (1024 <= self.min_size <= self.max_size):
            raise InvalidParamsError("need 1 KiB <= min_size <= max_size")


def _draw_size(seed: int, tag: str, lo: int, hi: int) -> int:
    rng = Xorshift64Star(substream(seed, f"size:{tag}"))
    if lo == hi:
        return lo
    u = rng.next_float()
    return min(hi, max(lo, round(math.exp(math.log(lo) + u * (math.log(hi) - math.log(lo))))))


def build_corpus(config: CorpusConfig, seed: int, out_dir) -> Manifest:
    """Generate every sample file under ``out_dir/files`` and write
    ``out_dir/manifest.jsonl``. Variant C is tagged holdout at birth; all
    other samples start unassigned."""
    out_dir = Path(out_dir)
    files_dir = out_dir / "files"
    files_dir.mkdir(parents=True, exist_ok=True)

    samples = []

    def emit(variant: str, idx: int, data: bytes, split: str):
        sid = f"{variant}-{idx:05d}"
        rel = f"files/{sid}.bin"
        (files_dir / f"{sid}.bin").write_bytes(data)
        samples.append(
            Sample(
                id=sid,
                path=rel,
                label=1 if variant.startswith("tpk-") else 0,
                variant=variant,
                len=len(data),
                split=split,
            )
        )

    for kind in ("code", "text", "mixed", "sparse"):
        count = config.raw_counts.get(kind, 0)
        variant = f"raw-{kind}"
        for i in range(count):
            tag = f"{variant}:{i}"
            size = _draw_size(seed, tag, config.min_size, config.max_size)
            data = generate_synthetic_binary(kind, size, substream(seed, f"sample:{tag}"))
            emit(variant, i, data, "unassigned")

    for var in ("A", "B", "C"):
        count = config.packed_counts.get(var, 0)
        variant = f"tpk-{var}"
        for i in range(count):
            tag = f"{variant}:{i}"
            size = _draw_size(seed, tag, config.min_size, config.max_size)
            payload = generate_synthetic_binary("code", size, substream(seed, f"sample:{tag}"))
            key = Xorshift64Star(substream(seed, f"key:{tag}")).bytes(8)
            data = toy_pack(payload, PackSpec(variant=var, key=key))
            emit(variant, i, data, "holdout" if var == "C" else "unassigned")

    manifest = Manifest(seed=seed, samples=samples, root=out_dir)
    write_manifest(out_dir / "manifest.jsonl", manifest)
    return manifest


def stratified_split(manifest: Manifest, fractions=(0.70, 0.15, 0.15), seed: int = 0) -> Manifest:
    """Assign train/val/test per class with cumulative-rounding boundaries.

    Holdout samples keep their tag and never enter the shuffle. Per-class
    split counts land within 1 of class_count * fraction.
    """
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9:
        raise InvalidParamsError(f"fractions must sum to 1, got {fractions}")
    assignable = [s for s in manifest.samples if s.split != "holdout"]
    for label in (0, 1):
        if sum(1 for s in assignable if s.label == label) < 3:
            raise ClassTooSmallError(f"class {label} has fewer than 3 assignable samples")

    assignment = {}
    for label in (0, 1):
        members = [s.id for s in assignable if s.label == label]
        rng = Xorshift64Star(substream(seed, f"split:{label}"))
        rng.shuffle(members)
        n = len(members)
        b1 = math.floor(n * fractions[0] + 0.5)
        b2 = math.floor(n * (fractions[0] + fractions[1]) + 0.5)
        for pos, sid in enumerate(members):
            assignment[sid] = "train" if pos < b1 else ("val" if pos < b2 else "test")

    out = [
        s if s.split == "holdout" else replace(s, split=assignment[s.id])
        for s in manifest.samples
    ]
    return Manifest(seed=manifest.seed, samples=out, version=manifest.version, root=manifest.root)


def random_oversample(labels, seed: int = 0) -> np.ndarray:
    """Row indices balancing the two classes: all original rows in order,
    then duplicates drawn with replacement from the minority rows."""
    y = np.asarray(labels, dtype=np.int64)
    classes = np.unique(y)
    if classes.size != 2:
        raise SingleClassInputError(f"need exactly two classes, got {classes.tolist()}")
    counts = {int(c): int(np.sum(y == c)) for c in classes}
    minority = min(counts, key=counts.get)
    deficit = max(counts.values()) - counts[minority]
    base = np.arange(y.size, dtype=np.int64)
    if deficit == 0:
        return base
    pool = np.nonzero(y == minority)[0]
    rng = Xorshift64Star(substream(seed, "ros"))
    extra = np.array([pool[rng.randrange(pool.size)] for _ in range(deficit)], dtype=np.int64)
    return np.concatenate([base, extra])
