"""Synthetic corpus: generators, toy packer, manifests, splits, balancing."""

from .corpus import (
    CorpusConfig,
    Manifest,
    Sample,
    build_corpus,
    random_oversample,
    read_manifest,
    stratified_split,
    write_manifest,
)
from .synth import KINDS, MIN_SIZE, generate_synthetic_binary
from .toypack import (
    PackSpec,
    is_toy_packed,
    keystream,
    rle_decode,
    rle_encode,
    toy_pack,
    toy_unpack,
)

__all__ = [
    "CorpusConfig",
    "Manifest",
    "Sample",
    "build_corpus",
    "random_oversample",
    "read_manifest",
    "stratified_split",
    "write_manifest",
    "KINDS",
    "MIN_SIZE",
    "generate_synthetic_binary",
    "PackSpec",
    "is_toy_packed",
    "keystream",
    "rle_decode",
    "rle_encode",
    "toy_pack",
    "toy_unpack",
]
