"""PNG loading and split assembly.

Images are 224x224 grayscale PNGs named ``<sample id>.png``. Each is
replicated to three channels and normalized with the ImageNet statistics the
pretrained backbones expect. The train split can be balanced by duplicating
minority-class rows; duplicates are exact copies taken in manifest order, so
the result is deterministic without any RNG.
"""

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import MissingImageError, SplitEmptyError
from .manifest import split_rows

TARGET_SIDE = 224
IMAGENET_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
IMAGENET_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


@dataclass
class SplitData:
    """One split's tensors: X is (n, 3, 224, 224) float32, y is (n,) float32."""

    ids: list
    X: np.ndarray
    y: np.ndarray


def load_image(path) -> np.ndarray:
    """Read one PNG as a (224, 224) uint8 grid. Off-size images are resized
    with a warning; the exporter should already emit 224x224."""
    path = Path(path)
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as exc:
        raise MissingImageError(f"cannot read image {path}: {exc}") from exc
    if img.mode != "L":
        img = img.convert("L")
    if img.size != (TARGET_SIDE, TARGET_SIDE):
        warnings.warn(
            f"{path.name}: {img.size[0]}x{img.size[1]} input resized to "
            f"{TARGET_SIDE}x{TARGET_SIDE}",
            stacklevel=2,
        )
        img = img.resize((TARGET_SIDE, TARGET_SIDE), Image.BILINEAR)
    return np.asarray(img, dtype=np.uint8)


def to_model_array(gray: np.ndarray) -> np.ndarray:
    """Grayscale (H, W) uint8 -> normalized (3, H, W) float32. The three
    channels are identical before normalization (channel replication)."""
    scaled = gray.astype(np.float32) / 255.0
    stacked = np.repeat(scaled[None, :, :], 3, axis=0)
    return (stacked - IMAGENET_MEAN[:, None, None]) / IMAGENET_STD[:, None, None]


def balance_rows(rows):
    """Equalize class counts by cycling minority rows in manifest order.
    Every appended row is an exact copy of an existing minority row."""
    by_label = {0: [s for s in rows if s.label == 0], 1: [s for s in rows if s.label == 1]}
    n0, n1 = len(by_label[0]), len(by_label[1])
    if n0 == 0 or n1 == 0 or n0 == n1:
        return list(rows)
    minority = 0 if n0 < n1 else 1
    pool = by_label[minority]
    deficit = abs(n0 - n1)
    extras = [pool[i % len(pool)] for i in range(deficit)]
    return list(rows) + extras


def load_split(samples, images_dir, split: str, balance: bool = False) -> SplitData:
    """Assemble one split's arrays from exported PNGs, in manifest order."""
    rows = split_rows(samples, split)
    if not rows:
        raise SplitEmptyError(f"no samples with split={split!r}")
    if balance:
        rows = balance_rows(rows)
    images_dir = Path(images_dir)
    X = np.empty((len(rows), 3, TARGET_SIDE, TARGET_SIDE), dtype=np.float32)
    y = np.empty(len(rows), dtype=np.float32)
    ids = []
    for i, s in enumerate(rows):
        X[i] = to_model_array(load_image(images_dir / f"{s.id}.png"))
        y[i] = s.label
        ids.append(s.id)
    return SplitData(ids=ids, X=X, y=y)


def batch_count(n: int, batch_size: int) -> int:
    return math.ceil(n / batch_size)
