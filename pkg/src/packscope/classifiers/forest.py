"""Random forest with Gini-split decision trees, built from scratch.

Each tree trains on a bootstrap resample (same size, with replacement) and
considers a fresh random feature subset at every node. Thresholds are
midpoints between consecutive distinct sorted values; rows with
value <= threshold route left. Leaves store the class-1 fraction; the forest
confidence is the mean leaf fraction across trees.

Determinism: tree t draws all its randomness from the sub-stream
``tree:{t}`` of the forest seed, so trees could be built in any order (or in
parallel) with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyTrainingSetError, InvalidParamsError
from ..rng import Xorshift64Star, substream
from .base import validate_training_data
from .scaler import StandardScaler, fit_scaler, apply_scaler


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; ``feature`` is -1 at leaves, children are node ids."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    frac1: np.ndarray

    def scores(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            f = self.feature[node]
            sel = np.nonzero(f >= 0)[0]
            if sel.size == 0:
                return self.frac1[node]
            vals = X[sel, f[sel]]
            go_left = vals <= self.threshold[node[sel]]
            node[sel] = np.where(go_left, self.left[node[sel]], self.right[node[sel]])


@dataclass(frozen=True)
class ForestModel:
    kind = "forest"
    scaler: StandardScaler
    trees: tuple = field(repr=False)
    n_trees: int = 100
    max_depth: int = 0  # 0 = unlimited
    min_leaf: int = 1
    features_per_split: int = 0
    seed: int = 0
    bootstrap: bool = True

    def _scores(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0])
        for t in self.trees:
            acc += t.scores(X)
        return acc / len(self.trees)


def gini_impurity(labels) -> float:
    y = np.asarray(labels)
    if y.size == 0:
        return 0.0
    p1 = float(np.mean(y == 1))
    return 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1)


def best_split(values, labels, min_leaf: int = 1):
    """Best (threshold, gain) on one feature, or None when no admissible
    split exists. Candidates are midpoints between consecutive distinct
    sorted values; equal gains keep the lowest threshold."""
    v = np.asarray(values, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    n = v.size
    order = np.argsort(v, kind="stable")
    sv, sy = v[order], y[order]
    boundaries = np.nonzero(sv[:-1] < sv[1:])[0]
    if boundaries.size == 0:
        return None
    left_n = boundaries + 1.0
    right_n = n - left_n
    ok = (left_n >= min_leaf) & (right_n >= min_leaf)
    if not ok.any():
        return None
    cum1 = np.cumsum(sy)
    l1 = cum1[boundaries]
    r1 = int(sy.sum()) - l1
    pl, pr = l1 / left_n, r1 / right_n
    gini_l = 1.0 - pl * pl - (1.0 - pl) * (1.0 - pl)
    gini_r = 1.0 - pr * pr - (1.0 - pr) * (1.0 - pr)
    gain = gini_impurity(sy) - (left_n * gini_l + right_n * gini_r) / n
    gain[~ok] = -np.inf
    j = int(np.argmax(gain))
    threshold = (sv[boundaries[j]] + sv[boundaries[j] + 1]) / 2.0
    return threshold, float(gain[j])


def _sample_features(rng: Xorshift64Star, d: int, m: int):
    """m distinct feature indices via a partial Fisher-Yates pass."""
    pool = list(range(d))
    out = []
    for i in range(min(m, d)):
        j = i + rng.randrange(d - i)
        pool[i], pool[j] = pool[j], pool[i]
        out.append(pool[i])
    return out


def _build_tree(X, y, rng, max_depth, min_leaf, n_feats) -> Tree:
    d = X.shape[1]
    nodes = []  # [feature, threshold, left, right, frac1]
    stack = [(np.arange(X.shape[0]), 0, -1, -1)]  # rows, depth, parent, side
    while stack:
        rows, depth, parent, side = stack.pop()
        nid = len(nodes)
        yv = y[rows]
        ones = int(yv.sum())
        nodes.append([-1, 0.0, -1, -1, ones / rows.size])
        if parent >= 0:
            nodes[parent][2 + side] = nid

        if ones in (0, rows.size):
            continue
        if max_depth and depth >= max_depth:
            continue
        if rows.size < 2 * min_leaf:
            continue

        best = None  # (gain, feature, threshold); strictly larger gain wins
        for f in _sample_features(rng, d, n_feats):
            found = best_split(X[rows, f], yv, min_leaf)
            if found is not None and (best is None or found[1] > best[0]):
                best = (found[1], f, found[0])
        if best is None or best[0] <= 0:
            continue

        _, f, thr = best
        nodes[nid][0] = f
        nodes[nid][1] = thr
        mask = X[rows, f] <= thr
        # push right first so the left child is materialized (and numbered)
        # first: stable pre-order ids
        stack.append((rows[~mask], depth + 1, nid, 1))
        stack.append((rows[mask], depth + 1, nid, 0))

    arr = np.array(nodes, dtype=np.float64)
    return Tree(
        feature=arr[:, 0].astype(np.int64),
        threshold=arr[:, 1].copy(),
        left=arr[:, 2].astype(np.int64),
        right=arr[:, 3].astype(np.int64),
        frac1=arr[:, 4].copy(),
    )


def train_random_forest(
    features,
    labels,
    n_trees: int = 100,
    max_depth: int | None = None,
    min_leaf: int = 1,
    features_per_split: int | None = None,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    X0, y = validate_training_data(features, labels)
    if X0.shape[0] == 0:
        raise EmptyTrainingSetError("forest needs at least one training row")
    if n_trees < 1 or min_leaf < 1:
        raise InvalidParamsError("n_trees and min_leaf must be >= 1")
    d = X0.shape[1]
    n_feats = features_per_split if features_per_split else int(np.ceil(np.sqrt(d)))
    depth = max_depth if max_depth else 0

    scaler = fit_scaler(X0)
    X = apply_scaler(scaler, X0)
    n = X.shape[0]

    trees = []
    for t in range(n_trees):
        rng = Xorshift64Star(substream(seed, f"tree:{t}"))
        if bootstrap:
            idx = np.array([rng.randrange(n) for _ in range(n)], dtype=np.int64)
        else:
            idx = np.arange(n)
        trees.append(_build_tree(X[idx], y[idx], rng, depth, min_leaf, n_feats))

    return ForestModel(
        scaler=scaler,
        trees=tuple(trees),
        n_trees=n_trees,
        max_depth=depth,
        min_leaf=min_leaf,
        features_per_split=n_feats,
        seed=seed,
        bootstrap=bootstrap,
    )
