"""Packed-executable detection via byte-plot images and Gabor texture jets.

Pipeline: raw bytes -> grayscale byte-plot -> 24-dim Gabor jet (mean and
variance of 12 filter responses) -> classical binary classifier -> packed /
non-packed verdict. A deterministic synthetic corpus with a toy packer
(including a held-out "unknown" variant) exercises the whole chain.
"""

__version__ = "0.1.0"
