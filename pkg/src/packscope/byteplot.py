"""Byte-plot conversion: raw bytes to rectangular grayscale images.

Each input byte becomes one pixel intensity (0..255), laid out left to right,
top to bottom. The final row is zero-padded to complete the rectangle. Width
comes from a policy: a fixed pixel count, or the adaptive table below keyed
on file size (the convention used throughout malware-visualization work):

    <  10 KiB ->   32      < 200 KiB ->  384
    <  30 KiB ->   64      < 500 KiB ->  512
    <  60 KiB ->  128      <   1 MiB ->  768
    < 100 KiB ->  256      >=  1 MiB -> 1024

Resize sampling is pinned for cross-implementation reproducibility: source
coordinate s = (t + 0.5) * (src / dst) - 0.5, clamped to [0, src - 1].
Nearest resolves an exact .5 fraction toward the lower index; bilinear blends
the four neighbors and rounds intensities half-up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import (
    EmptyInputError,
    FormatError,
    InputTooLargeError,
    InvalidParamsError,
)

MAX_INPUT_BYTES = 256 * 1024 * 1024

ADAPTIVE_WIDTH_TABLE = (
    (10 * 1024, 32),
    (30 * 1024, 64),
    (60 * 1024, 128),
    (100 * 1024, 256),
    (200 * 1024, 384),
    (500 * 1024, 512),
    (1024 * 1024, 768),
)
ADAPTIVE_WIDTH_MAX = 1024

NEAREST = "nearest"
BILINEAR = "bilinear"


@dataclass(frozen=True)
class WidthPolicy:
    """Image width selection: ``fixed`` with an explicit width, or ``adaptive``."""

    mode: str = "adaptive"
    width: int = 0

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise InvalidParamsError(f"unknown width mode: {self.mode!r}")
        if self.mode == "fixed" and self.width < 1:
            raise InvalidParamsError("fixed width must be >= 1")

    @classmethod
    def fixed(cls, width: int) -> "WidthPolicy":
        return cls(mode="fixed", width=width)

    @classmethod
    def adaptive(cls) -> "WidthPolicy":
        return cls(mode="adaptive")

    @classmethod
    def parse(cls, text: str) -> "WidthPolicy":
        """Parse the CLI form: ``adaptive`` or ``fixed:N``."""
        if text == "adaptive":
            return cls.adaptive()
        if text.startswith("fixed:"):
            try:
                return cls.fixed(int(text.split(":", 1)[1]))
            except ValueError as exc:
                raise InvalidParamsError(f"bad fixed width in {text!r}") from exc
        raise InvalidParamsError(f"width policy must be 'adaptive' or 'fixed:N', got {text!r}")

    def width_for(self, size: int) -> int:
        if self.mode == "fixed":
            return self.width
        for limit, width in ADAPTIVE_WIDTH_TABLE:
            if size < limit:
                return width
        return ADAPTIVE_WIDTH_MAX


@dataclass(frozen=True)
class ByteImage:
    """Rectangular grid of 8-bit pixels plus the originating byte count.

    ``pixels`` is a read-only uint8 array of shape (height, width); the first
    ``source_len`` pixels in row-major order are the source bytes, the rest
    are zero padding.
    """

    width: int
    height: int
    pixels: np.ndarray = field(repr=False)
    source_len: int

    def __post_init__(self):
        px = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width):
            raise InvalidParamsError(
                f"pixel grid {px.shape} does not match {self.height}x{self.width}"
            )
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    def tobytes(self) -> bytes:
        """Row-major pixel bytes (including padding)."""
        return self.pixels.tobytes()

    def source_bytes(self) -> bytes:
        """The original input bytes (padding stripped)."""
        return self.tobytes()[: self.source_len]


def bytes_to_image(data: bytes, policy: WidthPolicy) -> ByteImage:
    """Lay ``data`` out row-major at the policy's width, zero-padding the tail."""
    n = len(data)
    if n == 0:
        raise EmptyInputError("cannot plot an empty byte sequence")
    if n > MAX_INPUT_BYTES:
        raise InputTooLargeError(f"{n} bytes exceeds the {MAX_INPUT_BYTES}-byte limit")
    width = policy.width_for(n)
    height = -(-n // width)
    grid = np.zeros(width * height, dtype=np.uint8)
    grid[:n] = np.frombuffer(data, dtype=np.uint8)
    return ByteImage(width=width, height=height, pixels=grid.reshape(height, width), source_len=n)


def _sample_coords(src: int, dst: int) -> np.ndarray:
    s = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
    return np.clip(s, 0.0, src - 1.0)


def resize_image(img: ByteImage, target_w: int, target_h: int, method: str = BILINEAR) -> ByteImage:
    """Resample to (target_w, target_h) with the pinned coordinate formula."""
    if target_w < 1 or target_h < 1:
        raise InvalidParamsError("target dimensions must be >= 1")
    if method not in (NEAREST, BILINEAR):
        raise InvalidParamsError(f"unknown resize method: {method!r}")
    if (target_w, target_h) == (img.width, img.height):
        return ByteImage(img.width, img.height, img.pixels, img.width * img.height)

    sx = _sample_coords(img.width, target_w)
    sy = _sample_coords(img.height, target_h)
    src = img.pixels

    if method == NEAREST:
        # Exact-half fractions resolve to the lower index: ceil(s - 0.5).
        ix = np.ceil(sx - 0.5).astype(np.intp)
        iy = np.ceil(sy - 0.5).astype(np.intp)
        out = src[np.ix_(iy, ix)]
    else:
        x0 = np.floor(sx).astype(np.intp)
        y0 = np.floor(sy).astype(np.intp)
        x1 = np.minimum(x0 + 1, img.width - 1)
        y1 = np.minimum(y0 + 1, img.height - 1)
        fx = sx - x0
        fy = (sy - y0)[:, None]
        p = src.astype(np.float64)
        top = (1.0 - fx) * p[np.ix_(y0, x0)] + fx * p[np.ix_(y0, x1)]
        bot = (1.0 - fx) * p[np.ix_(y1, x0)] + fx * p[np.ix_(y1, x1)]
        blended = (1.0 - fy) * top + fy * bot
        out = np.floor(blended + 0.5).astype(np.uint8)

    return ByteImage(target_w, target_h, np.ascontiguousarray(out), target_w * target_h)


def export_png(img: ByteImage, path) -> None:
    """Write an 8-bit single-channel grayscale PNG (no alpha, no interlace)."""
    Image.fromarray(np.asarray(img.pixels), mode="L").save(path, format="PNG")


def import_png(path) -> ByteImage:
    """Read an 8-bit grayscale PNG back into a ByteImage.

    The padding boundary is not recoverable from a PNG, so ``source_len``
    covers the whole raster.
    """
    with Image.open(path) as im:
        if im.format != "PNG":
            raise FormatError(f"{path}: not a PNG file")
        if im.mode != "L":
            raise FormatError(f"{path}: expected 8-bit grayscale, got mode {im.mode!r}")
        arr = np.asarray(im, dtype=np.uint8)
    h, w = arr.shape
    return ByteImage(width=w, height=h, pixels=arr, source_len=w * h)


def shannon_entropy(data: bytes) -> float:
    """Shannon entropy of the byte-value distribution, in bits per byte."""
    if len(data) == 0:
        raise EmptyInputError("entropy of an empty sequence is undefined")
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    p = counts[counts > 0] / len(data)
    return float(-np.sum(p * np.log2(p)))
