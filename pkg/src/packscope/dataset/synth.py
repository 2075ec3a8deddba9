"""Deterministic synthetic "binary" generators for the non-packed corpus.

Four content kinds:

    CodeLike  skewed 256-symbol distribution: 40% of mass on 16 designated
              opcode values, 40% on 64 operand values, 20% uniform over the
              remaining 176 (pinned table below)
    TextLike  weighted printable ASCII in [0x09, 0x7E], English-like letter
              frequencies for a low-entropy prose look
    Mixed     labeled sections cycling CodeLike / TextLike / Sparse
    Sparse    short random data chunks interleaved with long zero runs

Sampling draws 16-bit values from the block byte stream and rejection-samples
them onto an expansion table whose entry counts encode the weights exactly,
so every kind is bit-reproducible from (kind, size, seed) alone.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidParamsError, SizeTooSmallError
from ..rng import Xorshift64Star, block_bytes, substream

MIN_SIZE = 1024

KINDS = ("code", "text", "mixed", "sparse")

# 16 common x86-64 instruction bytes play the "opcode" role.
OPCODE_VALUES = (
    0x00, 0x0F, 0x31, 0x39, 0x48, 0x4C, 0x74, 0x75,
    0x83, 0x85, 0x89, 0x8B, 0xC3, 0xE8, 0xE9, 0xFF,
)
# Operands: the 64 smallest byte values not already claimed as opcodes
# (small immediates and displacements dominate real operand bytes).
OPERAND_VALUES = tuple(
    v for v in range(256) if v not in OPCODE_VALUES
)[:64]

_SECTION_KINDS = ("code", "text", "sparse")
_SECTION_BODY = 4096
_SECTION_MAGIC = b"SEC"


def _build_code_table() -> np.ndarray:
    """1760-entry expansion table: opcodes 44 entries each (40% of mass),
    operands 11 each (40%), the rest 2 each (20%)."""
    rest = [v for v in range(256) if v not in OPCODE_VALUES and v not in OPERAND_VALUES]
    entries = []
    for v in OPCODE_VALUES:
        entries.extend([v] * 44)
    for v in OPERAND_VALUES:
        entries.extend([v] * 11)
    for v in rest:
        entries.extend([v] * 2)
    return np.array(entries, dtype=np.uint8)


def _build_text_table() -> np.ndarray:
    """Weighted expansion over printable ASCII plus tab and newline."""
    weights = dict.fromkeys(range(0x09, 0x7F), 0)
    weights.pop(0x0B, None)  # keep only tab/newline from the control range
    weights.pop(0x0C, None)
    weights.pop(0x0D, None)
    for v in range(0x0E, 0x20):
        weights.pop(v, None)
    letter_freq = {
        "e": 95, "t": 70, "a": 62, "o": 58, "i": 54, "n": 52, "s": 49, "h": 47,
        "r": 46, "d": 33, "l": 31, "u": 21, "c": 21, "m": 19, "w": 18, "f": 17,
        "g": 16, "y": 15, "p": 15, "b": 12, "v": 8, "k": 6, "x": 2, "j": 2,
        "q": 1, "z": 1,
    }
    for ch, w in letter_freq.items():
        weights[ord(ch)] = w
        weights[ord(ch.upper())] = 2
    for ch in "0123456789":
        weights[ord(ch)] = 2
    for ch, w in {" ": 130, ".": 6, ",": 6, "'": 3, '"': 2, "-": 2}.items():
        weights[ord(ch)] = w
    weights[0x0A] = 10
    weights[0x09] = 1
    for v, w in weights.items():
        if w == 0:
            weights[v] = 1  # all remaining printable punctuation
    entries = []
    for v in sorted(weights):
        entries.extend([v] * weights[v])
    return np.array(entries, dtype=np.uint8)


_CODE_TABLE = _build_code_table()
_TEXT_TABLE = _build_text_table()


def _table_sample(table: np.ndarray, n: int, seed: int) -> np.ndarray:
    """Draw n table entries by rejection sampling 16-bit values: accept
    u < floor(65536 / len(table)) * len(table), index = u % len(table)."""
    t = len(table)
    limit = (65536 // t) * t
    accept_rate = limit / 65536.0
    out = np.empty(n, dtype=np.uint8)
    filled = 0
    need_u16 = int(n / accept_rate * 1.05) + 64
    consumed = 0
    while filled < n:
        raw = block_bytes(seed, 2 * (consumed + need_u16))[2 * consumed :]
        draws = raw.view("<u2")
        kept = draws[draws < limit]
        take = min(n - filled, kept.size)
        out[filled : filled + take] = table[kept[:take] % t]
        filled += take
        consumed += draws.size
        need_u16 = max(256, int((n - filled) / accept_rate * 1.1) + 64)
    return out


def _gen_code(size: int, seed: int) -> bytes:
    return _table_sample(_CODE_TABLE, size, substream(seed, "codelike")).tobytes()


def _gen_text(size: int, seed: int) -> bytes:
    return _table_sample(_TEXT_TABLE, size, substream(seed, "textlike")).tobytes()


def _gen_sparse(size: int, seed: int) -> bytes:
    rng = Xorshift64Star(substream(seed, "sparse"))
    parts = []
    produced = 0
    while produced < size:
        data_len = min(64 + rng.randrange(193), size - produced)
        parts.append(rng.bytes(data_len))
        produced += data_len
        if produced >= size:
            break
        zero_len = min(1024 + rng.randrange(2049), size - produced)
        parts.append(bytes(zero_len))
        produced += zero_len
    return b"".join(parts)


def _gen_mixed(size: int, seed: int) -> bytes:
    """Labeled sections: 8-byte header (magic, kind code, u32 LE body length)
    then a body of the named kind, cycling code/text/sparse."""
    gens = {"code": _gen_code, "text": _gen_text, "sparse": _gen_sparse}
    parts = []
    produced = 0
    k = 0
    while produced < size:
        remaining = size - produced
        if remaining <= 8:
            parts.append(bytes(remaining))
            break
        body_len = min(_SECTION_BODY, remaining - 8)
        kind = _SECTION_KINDS[k % len(_SECTION_KINDS)]
        parts.append(_SECTION_MAGIC + bytes([k % len(_SECTION_KINDS)]) + body_len.to_bytes(4, "little"))
        parts.append(gens[kind](body_len, substream(seed, f"mixed:{k}")))
        produced += 8 + body_len
        k += 1
    return b"".join(parts)


_GENERATORS = {
    "code": _gen_code,
    "text": _gen_text,
    "mixed": _gen_mixed,
    "sparse": _gen_sparse,
}


def generate_synthetic_binary(kind: str, size: int, seed: int) -> bytes:
    """Deterministic pseudo-binary of exactly ``size`` bytes (minimum 1 KiB)."""
    if kind not in _GENERATORS:
        raise InvalidParamsError(f"kind must be one of {KINDS}, got {kind!r}")
    if size < MIN_SIZE:
        raise SizeTooSmallError(f"size {size} below the {MIN_SIZE}-byte minimum")
    return _GENERATORS[kind](size, seed)
