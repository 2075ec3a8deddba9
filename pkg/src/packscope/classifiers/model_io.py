"""Trained-model persistence.

Layout (all integers and floats little-endian):

    magic   4 bytes  PSMD
    version u16      currently 1
    kind    u8       knn=1, logreg=2, forest=3, mlp=4, svm=5
    scaler  u32 d, then d f64 means, d f64 stds
    body    kind-specific, see the packers below

Index-like node fields in forest bodies use u32 with 0xFFFFFFFF standing in
for "none" (leaf feature / missing child).
"""

from __future__ import annotations

import numpy as np

from .._util import atomic_write_bytes
from ..errors import CorruptModelError, VersionMismatchError
from .forest import ForestModel, Tree
from .knn import KnnModel
from .linear import LogRegModel, SvmModel
from .mlp import MlpModel
from .scaler import StandardScaler

MAGIC = b"PSMD"
VERSION = 1
NONE_U32 = 0xFFFFFFFF

KIND_TAGS = {"knn": 1, "logreg": 2, "forest": 3, "mlp": 4, "svm": 5}


class _Writer:
    def __init__(self):
        self.parts = []

    def u8(self, v):
        self.parts.append(int(v).to_bytes(1, "little"))

    def u16(self, v):
        self.parts.append(int(v).to_bytes(2, "little"))

    def u32(self, v):
        self.parts.append(int(v).to_bytes(4, "little"))

    def u64(self, v):
        self.parts.append(int(v).to_bytes(8, "little"))

    def f64(self, v):
        self.parts.append(np.float64(v).tobytes())

    def f64s(self, arr):
        self.parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())

    def u32s(self, arr):
        self.parts.append(np.ascontiguousarray(arr, dtype="<u4").tobytes())

    def blob(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes, where: str):
        self.data = data
        self.off = 0
        self.where = where

    def _take(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise CorruptModelError(f"{self.where}: truncated model file")
        chunk = self.data[self.off : self.off + n]
        self.off += n
        return chunk

    def u8(self) -> int:
        return self._take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self._take(2), "little")

    def u32(self) -> int:
        return int.from_bytes(self._take(4), "little")

    def u64(self) -> int:
        return int.from_bytes(self._take(8), "little")

    def f64(self) -> float:
        return float(np.frombuffer(self._take(8), dtype="<f8")[0])

    def f64s(self, n) -> np.ndarray:
        return np.frombuffer(self._take(8 * n), dtype="<f8").copy()

    def u32s(self, n) -> np.ndarray:
        return np.frombuffer(self._take(4 * n), dtype="<u4").astype(np.int64)

    def done(self):
        if self.off != len(self.data):
            raise CorruptModelError(f"{self.where}: {len(self.data) - self.off} trailing bytes")


def _signed(idx: np.ndarray) -> np.ndarray:
    out = idx.astype(np.int64)
    out[idx == NONE_U32] = -1
    return out


def _unsigned(idx: np.ndarray) -> np.ndarray:
    out = np.asarray(idx, dtype=np.int64).copy()
    out[out < 0] = NONE_U32
    return out


def save_model(model, path) -> None:
    w = _Writer()
    w.parts.append(MAGIC)
    w.u16(VERSION)
    w.u8(KIND_TAGS[model.kind])
    w.u32(model.scaler.dim)
    w.f64s(model.scaler.mean)
    w.f64s(model.scaler.std)

    if model.kind == "knn":
        w.u32(model.k)
        w.u32(model.X.shape[0])
        w.f64s(model.X)
        w.u32s(model.y)
    elif model.kind == "logreg":
        w.f64(model.learning_rate)
        w.u32(model.epochs)
        w.f64(model.l2)
        w.f64s(model.w)
        w.f64(model.b)
    elif model.kind == "svm":
        w.f64(model.c)
        w.f64(model.learning_rate)
        w.u32(model.epochs)
        w.f64s(model.w)
        w.f64(model.b)
    elif model.kind == "forest":
        w.u32(model.n_trees)
        w.u32(model.max_depth)
        w.u32(model.min_leaf)
        w.u32(model.features_per_split)
        w.u64(model.seed)
        w.u8(1 if model.bootstrap else 0)
        w.u32(len(model.trees))
        for t in model.trees:
            w.u32(t.feature.shape[0])
            w.u32s(_unsigned(t.feature))
            w.f64s(t.threshold)
            w.u32s(_unsigned(t.left))
            w.u32s(_unsigned(t.right))
            w.f64s(t.frac1)
    elif model.kind == "mlp":
        w.f64(model.learning_rate)
        w.u32(model.epochs)
        w.u64(model.seed)
        w.u32(len(model.hidden_sizes))
        for h in model.hidden_sizes:
            w.u32(h)
        w.u32(len(model.weights))
        for wt, b in zip(model.weights, model.biases):
            w.u32(wt.shape[0])
            w.u32(wt.shape[1])
            w.f64s(wt)
            w.f64s(b)
    else:
        raise CorruptModelError(f"unknown model kind {model.kind!r}")
    atomic_write_bytes(path, w.blob())


def load_model(path):
    from pathlib import Path

    blob = Path(path).read_bytes()
    if len(blob) < 7 or blob[:4] != MAGIC:
        raise CorruptModelError(f"{path}: not a model file")
    r = _Reader(blob, str(path))
    r.off = 4
    version = r.u16()
    if version != VERSION:
        raise VersionMismatchError(f"{path}: model version {version}, expected {VERSION}")
    tag = r.u8()
    kind = next((k for k, t in KIND_TAGS.items() if t == tag), None)
    if kind is None:
        raise CorruptModelError(f"{path}: unknown model kind tag {tag}")
    d = r.u32()
    scaler = StandardScaler(mean=r.f64s(d), std=r.f64s(d))

    if kind == "knn":
        k = r.u32()
        n = r.u32()
        X = r.f64s(n * d).reshape(n, d)
        y = r.u32s(n)
        model = KnnModel(scaler=scaler, k=k, X=X, y=y)
    elif kind == "logreg":
        lr = r.f64()
        epochs = r.u32()
        l2 = r.f64()
        wvec = r.f64s(d)
        b = r.f64()
        model = LogRegModel(scaler=scaler, w=wvec, b=b, learning_rate=lr, epochs=epochs, l2=l2)
    elif kind == "svm":
        c = r.f64()
        lr = r.f64()
        epochs = r.u32()
        wvec = r.f64s(d)
        b = r.f64()
        model = SvmModel(scaler=scaler, w=wvec, b=b, c=c, learning_rate=lr, epochs=epochs)
    elif kind == "forest":
        n_trees = r.u32()
        max_depth = r.u32()
        min_leaf = r.u32()
        fps = r.u32()
        seed = r.u64()
        bootstrap = bool(r.u8())
        count = r.u32()
        trees = []
        for _ in range(count):
            n_nodes = r.u32()
            trees.append(
                Tree(
                    feature=_signed(r.u32s(n_nodes)),
                    threshold=r.f64s(n_nodes),
                    left=_signed(r.u32s(n_nodes)),
                    right=_signed(r.u32s(n_nodes)),
                    frac1=r.f64s(n_nodes),
                )
            )
        model = ForestModel(
            scaler=scaler,
            trees=tuple(trees),
            n_trees=n_trees,
            max_depth=max_depth,
            min_leaf=min_leaf,
            features_per_split=fps,
            seed=seed,
            bootstrap=bootstrap,
        )
    else:  # mlp
        lr = r.f64()
        epochs = r.u32()
        seed = r.u64()
        hidden = tuple(r.u32() for _ in range(r.u32()))
        layers = r.u32()
        weights, biases = [], []
        for _ in range(layers):
            fan_in = r.u32()
            fan_out = r.u32()
            weights.append(r.f64s(fan_in * fan_out).reshape(fan_in, fan_out))
            biases.append(r.f64s(fan_out))
        model = MlpModel(
            scaler=scaler,
            weights=tuple(weights),
            biases=tuple(biases),
            hidden_sizes=hidden,
            learning_rate=lr,
            epochs=epochs,
            seed=seed,
        )
    r.done()
    return model
