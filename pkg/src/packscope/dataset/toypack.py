"""Toy packer: a bit-exact stub-header-plus-obfuscated-body container.

Output layout (22-byte header, then body):

    magic   4 bytes  TPKA / TPKB / TPKC
    pad     1 byte   0x00
    code    1 byte   variant code (A=1, B=2, C=3)
    length  8 bytes  u64 little-endian original payload length
    key     8 bytes  keystream key

Bodies by variant:
    A: payload XOR keystream
    B: RLE(payload) XOR keystream
    C: RLE(payload) XOR permuted keystream, where each keystream byte is
       rotated left by 3 bits before use

The keystream is the scalar xorshift64* byte stream seeded from the key read
as a little-endian u64. Variant C plays the "unknown packer" role: new magic,
same skeleton, small keystream tweak.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CorruptPackedError, EmptyPayloadError, FormatError, InvalidParamsError
from ..rng import Xorshift64Star

HEADER_LEN = 22
RLE_ESCAPE = 0xFE
VARIANT_CODES = {"A": 1, "B": 2, "C": 3}
VARIANT_MAGICS = {"A": b"TPKA", "B": b"TPKB", "C": b"TPKC"}


@dataclass(frozen=True)
class PackSpec:
    variant: str
    key: bytes

    def __post_init__(self):
        if self.variant not in VARIANT_CODES:
            raise InvalidParamsError(f"variant must be A, B, or C, got {self.variant!r}")
        if len(self.key) != 8:
            raise InvalidParamsError(f"key must be exactly 8 bytes, got {len(self.key)}")

    @property
    def magic(self) -> bytes:
        return VARIANT_MAGICS[self.variant]


def _escape_literals(chunk: np.ndarray) -> bytes:
    """Copy a literal stretch, expanding each 0xFE to 0xFE 0x00."""
    esc = np.nonzero(chunk == RLE_ESCAPE)[0]
    if esc.size == 0:
        return chunk.tobytes()
    return np.insert(chunk, esc + 1, 0).tobytes()


def rle_encode(data: bytes) -> bytes:
    """Run-length encode: runs of >= 4 identical bytes become
    (0xFE, count 4..255, value); longer runs split greedily into 255-chunks
    with any sub-4 remainder emitted as literals; a literal 0xFE is escaped
    as 0xFE 0x00."""
    if len(data) == 0:
        return b""
    arr = np.frombuffer(data, dtype=np.uint8)
    change = np.nonzero(np.diff(arr))[0] + 1
    starts = np.concatenate(([0], change))
    lengths = np.diff(np.concatenate((starts, [arr.size])))
    long_runs = np.nonzero(lengths >= 4)[0]

    parts = []
    prev_end = 0
    for ri in long_runs.tolist():
        start = int(starts[ri])
        if start > prev_end:
            parts.append(_escape_literals(arr[prev_end:start]))
        remaining = int(lengths[ri])
        value = int(arr[start])
        while remaining >= 4:
            count = min(remaining, 255)
            parts.append(bytes((RLE_ESCAPE, count, value)))
            remaining -= count
        if remaining:
            tail = b"\xfe\x00" * remaining if value == RLE_ESCAPE else bytes([value]) * remaining
            parts.append(tail)
        prev_end = start + int(lengths[ri])
    if prev_end < arr.size:
        parts.append(_escape_literals(arr[prev_end:]))
    return b"".join(parts)


def rle_decode(data: bytes) -> bytes:
    out = bytearray()
    i = 0
    n = len(data)
    while True:
        j = data.find(RLE_ESCAPE, i)
        if j < 0:
            out += data[i:]
            return bytes(out)
        out += data[i:j]
        if j + 1 >= n:
            raise CorruptPackedError("dangling RLE escape byte")
        count = data[j + 1]
        if count == 0:
            out.append(RLE_ESCAPE)
            i = j + 2
        elif count >= 4:
            if j + 2 >= n:
                raise CorruptPackedError("truncated RLE run")
            out += bytes([data[j + 2]]) * count
            i = j + 3
        else:
            raise CorruptPackedError(f"invalid RLE run count {count}")


def keystream(key: bytes, n: int, permuted: bool = False) -> np.ndarray:
    """n keystream bytes for an 8-byte key; ``permuted`` rotates each byte
    left by 3 (the variant-C tweak)."""
    rng = Xorshift64Star(int.from_bytes(key, "little"))
    ks = np.frombuffer(rng.bytes(n), dtype=np.uint8)
    if permuted:
        ks = ((ks << 3) | (ks >> 5)).astype(np.uint8)
    return ks


def toy_pack(payload: bytes, spec: PackSpec) -> bytes:
    if len(payload) == 0:
        raise EmptyPayloadError("cannot pack an empty payload")
    header = (
        spec.magic
        + b"\x00"
        + bytes([VARIANT_CODES[spec.variant]])
        + len(payload).to_bytes(8, "little")
        + spec.key
    )
    if spec.variant == "A":
        plain = payload
    else:
        plain = rle_encode(payload)
    ks = keystream(spec.key, len(plain), permuted=(spec.variant == "C"))
    body = (np.frombuffer(plain, dtype=np.uint8) ^ ks).tobytes()
    return header + body


def toy_unpack(packed: bytes) -> bytes:
    if len(packed) < HEADER_LEN:
        raise FormatError(f"packed blob shorter than the {HEADER_LEN}-byte header")
    magic, pad, code = packed[:4], packed[4], packed[5]
    variant = next((v for v, m in VARIANT_MAGICS.items() if m == magic), None)
    if variant is None or pad != 0:
        raise FormatError(f"unrecognized stub header {packed[:6]!r}")
    if code != VARIANT_CODES[variant]:
        raise CorruptPackedError(f"variant code {code} does not match magic {magic!r}")
    orig_len = int.from_bytes(packed[6:14], "little")
    key = packed[14:22]
    body = packed[HEADER_LEN:]
    ks = keystream(key, len(body), permuted=(variant == "C"))
    plain = (np.frombuffer(body, dtype=np.uint8) ^ ks).tobytes() if body else b""
    payload = plain if variant == "A" else rle_decode(plain)
    if len(payload) != orig_len:
        raise CorruptPackedError(
            f"payload length {len(payload)} does not match header length {orig_len}"
        )
    return payload


def is_toy_packed(data: bytes) -> bool:
    """Header signature check (magic + pad + matching variant code)."""
    if len(data) < HEADER_LEN:
        return False
    variant = next((v for v, m in VARIANT_MAGICS.items() if m == data[:4]), None)
    return variant is not None and data[4] == 0 and data[5] == VARIANT_CODES[variant]
