"""CART trees on Gini impurity and the bootstrap forest over them.

The split scan itself runs in `sigfx._backend.best_split`; this module
handles node bookkeeping, the per-node feature subset, bootstrap
resampling and voting. Forest randomness is drawn per tree from
SeedSequence((seed, tree_index)), so construction order never matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sigfx import _backend

_LEAF = -1


@dataclass(frozen=True)
class CartTree:
    """Flat node arrays: feature < 0 marks a leaf storing its class vote."""

    feature: np.ndarray    # int32, _LEAF at leaves
    threshold: np.ndarray  # float64
    left: np.ndarray       # int32 child ids
    right: np.ndarray
    value: np.ndarray      # int8 class vote at leaves, -1 elsewhere

    @property
    def n_nodes(self):
        return len(self.feature)


def _leaf_class(n_pos, n_rows):
    # majority vote; an exact tie goes to class 0
    return 1 if 2 * n_pos > n_rows else 0


def grow_tree(X, y, rng, max_features=None, min_samples_split=2):
    """Fit one CART classification tree to a binary target.

    max_features limits the features scanned per node (sampled without
    replacement); None scans all of them. Nodes split while the best
    split strictly lowers weighted Gini impurity.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    n, p = X.shape
    k = p if max_features is None else min(max_features, p)
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(_LEAF)
        right.append(_LEAF)
        value.append(-1)
        return len(feature) - 1

    stack = [(new_node(), np.arange(n))]
    while stack:
        node, idx = stack.pop()
        m = len(idx)
        n_pos = int(y[idx].sum())
        if n_pos == 0 or n_pos == m or m < min_samples_split:
            value[node] = _leaf_class(n_pos, m)
            continue
        if k < p:
            feats = rng.permutation(p)[:k]
        else:
            feats = np.arange(p)
        sub = X[idx][:, feats]
        order = np.argsort(sub, axis=0, kind="stable")
        values = np.take_along_axis(sub, order, axis=0).T
        positives = y[idx][order].astype(np.float64).T
        fi, pos, thr, w = _backend.best_split(
            np.ascontiguousarray(values), np.ascontiguousarray(positives))
        if fi < 0:
            value[node] = _leaf_class(n_pos, m)
            continue
        frac = n_pos / m
        parent_gini = 1.0 - (frac * frac + (1.0 - frac) * (1.0 - frac))
        if not w < parent_gini:
            value[node] = _leaf_class(n_pos, m)
            continue
        f = int(feats[fi])
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node()
        right[node] = new_node()
        stack.append((right[node], idx[~go_left]))
        stack.append((left[node], idx[go_left]))
    return CartTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.int8),
    )


def tree_predict(tree, X):
    """Class votes for each row of X."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(len(X), dtype=np.int8)
    stack = [(0, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if len(idx) == 0:
            continue
        f = tree.feature[node]
        if f < 0:
            out[idx] = tree.value[node]
            continue
        go_left = X[idx, f] <= tree.threshold[node]
        stack.append((tree.left[node], idx[go_left]))
        stack.append((tree.right[node], idx[~go_left]))
    return out


@dataclass(frozen=True)
class Forest:
    trees: tuple
    n_features: int


def fit_forest(X, y, n_trees=100, max_features="sqrt", bootstrap=True,
               min_samples_split=2, seed=0):
    """Bagged CART forest for a binary target."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    n, p = X.shape
    if max_features == "sqrt":
        k = math.ceil(math.sqrt(p))
    else:
        k = max_features
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence((seed, t)))
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(grow_tree(X[rows], y[rows], rng, max_features=k,
                               min_samples_split=min_samples_split))
    return Forest(trees=tuple(trees), n_features=p)


def forest_vote_fraction(forest, X):
    """Share of trees voting class 1 per row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ValueError("expected shape (m, %d), got %r"
                         % (forest.n_features, X.shape))
    votes = np.zeros(len(X))
    for tree in forest.trees:
        votes += tree_predict(tree, X)
    return votes / len(forest.trees)


def forest_predict(forest, X):
    """Majority vote over trees; an exact tie goes to class 0."""
    return (forest_vote_fraction(forest, X) > 0.5).astype(np.int8)
