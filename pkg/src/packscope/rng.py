"""Deterministic random number generation.

Every seeded behavior in the toolkit (corpus synthesis, keystreams, splits,
oversampling, bootstrap draws, weight initialization) flows through the
xorshift64* generator defined here, so that identical seeds give bit-identical
artifacts regardless of platform or library versions.

Pinned algorithm (all arithmetic mod 2**64):

    state ^= state >> 12
    state ^= state << 25
    state ^= state >> 27
    output = state * 0x2545F4914F6CDD1D

A zero seed is replaced by ``ZERO_SEED_SUBSTITUTE`` (xorshift state must be
nonzero). Byte streams emit each 64-bit output little-endian, 8 bytes per
step. Sub-streams for distinct purposes are derived as
``seed XOR fnv1a64(purpose)`` so that, for example, the bootstrap draw for
tree 7 never overlaps the stream that initialized an MLP.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
MULTIPLIER = 0x2545F4914F6CDD1D
ZERO_SEED_SUBSTITUTE = 0x9E3779B97F4A7C15

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 encoding of ``text``."""
    h = _FNV_OFFSET
    for b in text.encode("utf-8"):
        h ^= b
        h = (h * _FNV_PRIME) & MASK64
    return h


def substream(seed: int, purpose: str) -> int:
    """Derive an independent stream seed for a named purpose."""
    return (seed & MASK64) ^ fnv1a64(purpose)


class Xorshift64Star:
    """Scalar xorshift64* stream. The reference for all vectorized variants."""

    def __init__(self, seed: int):
        seed &= MASK64
        self._state = seed if seed != 0 else ZERO_SEED_SUBSTITUTE

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * MULTIPLIER) & MASK64

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randrange(self, n: int) -> int:
        """Uniform in [0, n) via modulo reduction.

        The modulo bias is at most n / 2**64 and is accepted for the corpus
        and model sizes this toolkit works at.
        """
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def bytes(self, n: int) -> bytes:
        """Next ``n`` keystream bytes (each u64 emitted little-endian)."""
        steps = (n + 7) // 8
        out = bytearray()
        for _ in range(steps):
            out += self.next_u64().to_bytes(8, "little")
        return bytes(out[:n])


def block_u64_matrix(seed: int, n_blocks: int, steps: int) -> np.ndarray:
    """xorshift64* outputs for ``n_blocks`` parallel block streams.

    Block ``b`` is the stream seeded with ``substream(seed, "block:{b}")``;
    the result has shape (n_blocks, steps) and row ``b`` equals the first
    ``steps`` outputs of the equivalent scalar ``Xorshift64Star``. Blocks are
    advanced in lockstep with numpy so large corpora stay fast while staying
    bit-identical to the scalar definition.
    """
    seeds = []
    for b in range(n_blocks):
        s = substream(seed, f"block:{b}")
        seeds.append(s if s != 0 else ZERO_SEED_SUBSTITUTE)
    state = np.array(seeds, dtype=np.uint64)
    out = np.empty((steps, n_blocks), dtype=np.uint64)
    c12, c25, c27 = np.uint64(12), np.uint64(25), np.uint64(27)
    mult = np.uint64(MULTIPLIER)
    for i in range(steps):
        state ^= state >> c12
        state ^= state << c25
        state ^= state >> c27
        out[i] = state * mult
    return out.T


def block_bytes(seed: int, n: int, block_size: int = 8192) -> np.ndarray:
    """``n`` uniform bytes drawn from per-block sub-streams of ``seed``.

    The byte stream is the concatenation of ``block_size``-byte blocks; block
    ``b`` holds the little-endian bytes of its stream's u64 outputs. Output
    dtype is uint8.
    """
    if n <= 0:
        return np.empty(0, dtype=np.uint8)
    n_blocks = (n + block_size - 1) // block_size
    steps = block_size // 8
    words = block_u64_matrix(seed, n_blocks, steps)
    raw = words.astype("<u8").reshape(-1).view(np.uint8)
    return raw[:n].copy()
