"""Random forest of gini decision trees, fully seeded.

Trees grow without a depth limit until leaves are pure or no candidate
split improves impurity.  Per-split feature subsets default to
ceil(sqrt(d)); with a single tree, full feature sampling and bootstrap off,
the forest reduces exactly to one decision tree.
"""

from __future__ import annotations

import math

import numpy as np


def _best_split(X: np.ndarray, y_onehot: np.ndarray, rows: np.ndarray, features: np.ndarray):
    """(feature, threshold, quality) of the best gini split, or None."""
    counts = y_onehot[rows].sum(axis=0)
    n = len(rows)
    base = float((counts * counts).sum()) / n
    best = None
    best_q = base + 1e-12
    for f in features:
        vals = X[rows, f]
        order = np.argsort(vals, kind="stable")
        xs = vals[order]
        boundaries = np.nonzero(xs[:-1] < xs[1:])[0]
        if len(boundaries) == 0:
            continue
        cum = np.cumsum(y_onehot[rows[order]], axis=0)
        left = cum[boundaries]
        right = counts[None, :] - left
        n_left = boundaries + 1.0
        n_right = n - n_left
        q = (left * left).sum(axis=1) / n_left + (right * right).sum(axis=1) / n_right
        k = int(np.argmax(q))
        if q[k] > best_q:
            best_q = float(q[k])
            best = (int(f), float((xs[boundaries[k]] + xs[boundaries[k] + 1]) / 2.0))
    return best


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    rng: np.random.Generator,
    max_features: int,
) -> dict:
    y_onehot = np.zeros((X.shape[0], n_classes))
    y_onehot[np.arange(X.shape[0]), y] = 1.0
    d = X.shape[1]
    m = min(max_features, d)

    def grow(rows: np.ndarray) -> dict:
        counts = y_onehot[rows].sum(axis=0)
        if np.count_nonzero(counts) <= 1:
            return {"leaf": int(np.argmax(counts))}
        features = np.sort(rng.choice(d, size=m, replace=False))
        split = _best_split(X, y_onehot, rows, features)
        if split is None:
            return {"leaf": int(np.argmax(counts))}
        f, t = split
        mask = X[rows, f] <= t
        return {
            "feature": f,
            "threshold": t,
            "left": grow(rows[mask]),
            "right": grow(rows[~mask]),
        }

    return grow(np.arange(X.shape[0]))


def tree_predict(node: dict, X: np.ndarray) -> np.ndarray:
    out = np.zeros(X.shape[0], dtype=np.int64)
    idx = np.arange(X.shape[0])

    def walk(node: dict, idx: np.ndarray) -> None:
        if "leaf" in node:
            out[idx] = node["leaf"]
            return
        mask = X[idx, node["feature"]] <= node["threshold"]
        walk(node["left"], idx[mask])
        walk(node["right"], idx[~mask])

    walk(node, idx)
    return out


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, params) -> tuple[dict, dict]:
    n, d = X.shape
    max_features = params.max_features or math.ceil(math.sqrt(d))
    seeds = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    trees = []
    for t in range(params.n_trees):
        rng = np.random.default_rng(seeds[t])
        if params.bootstrap:
            rows = rng.integers(0, n, size=n)
            Xt, yt = X[rows], y[rows]
        else:
            Xt, yt = X, y
        trees.append(build_tree(Xt, yt, n_classes, rng, max_features))
    payload = {"trees": trees}
    return payload, {}


def scores(payload: dict, X: np.ndarray, n_classes: int) -> np.ndarray:
    votes = np.zeros((X.shape[0], n_classes))
    for tree in payload["trees"]:
        pred = tree_predict(tree, X)
        votes[np.arange(X.shape[0]), pred] += 1.0
    return votes
