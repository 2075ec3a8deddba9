"""Reader for the corpus manifest file.

The manifest is JSON-lines: a header object ``{"version":1,"seed":N}``
followed by one object per sample with keys ``id, path, label, variant,
len, split``. This module consumes the file format only; it shares no code
with the producer.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError

MANIFEST_VERSION = 1
SPLITS = ("train", "val", "test", "holdout", "unassigned")
SAMPLE_KEYS = ("id", "path", "label", "variant", "len", "split")


@dataclass(frozen=True)
class Sample:
    id: str
    path: str
    label: int
    variant: str
    len: int
    split: str


def read_manifest(path):
    """Parse a manifest into (seed, samples). Sample paths stay relative to
    the manifest's directory; resolve against ``Path(path).parent``."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError(f"{path}: empty manifest")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: bad header line: {exc}") from exc
    if not isinstance(header, dict) or "version" not in header or "seed" not in header:
        raise FormatError(f"{path}: header must carry version and seed")
    if header["version"] != MANIFEST_VERSION:
        raise FormatError(f"{path}: unsupported manifest version {header['version']}")

    samples = []
    for n, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{n}: bad sample line: {exc}") from exc
        missing = [k for k in SAMPLE_KEYS if k not in row]
        if missing:
            raise FormatError(f"{path}:{n}: sample missing keys {missing}")
        if row["label"] not in (0, 1):
            raise FormatError(f"{path}:{n}: label must be 0 or 1")
        if row["split"] not in SPLITS:
            raise FormatError(f"{path}:{n}: unknown split {row['split']!r}")
        samples.append(Sample(**{k: row[k] for k in SAMPLE_KEYS}))
    return int(header["seed"]), samples


def split_rows(samples, split: str):
    return [s for s in samples if s.split == split]
