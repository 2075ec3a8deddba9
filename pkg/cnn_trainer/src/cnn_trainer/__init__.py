"""CNN transfer-learning trainer for byte-plot image corpora.

Consumes a corpus manifest (JSON-lines) plus exported 224x224 grayscale
PNGs, trains a small dense head on a frozen pretrained-architecture
backbone (VGG16 or DenseNet121), and writes evaluation CSVs in the same
formats the byte-plot pipeline's tooling reads.
"""

__version__ = "0.1.0"
