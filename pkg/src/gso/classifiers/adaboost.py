"""SAMME boosting of multiclass decision stumps.

Each round fits the stump (feature, threshold, side classes) minimizing the
weighted error, then reweights instances multiplicatively and renormalizes,
so the weight vector stays a probability distribution.  Rounds stop early
when no stump beats random guessing.
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-10


def _fit_stump(X: np.ndarray, y: np.ndarray, w: np.ndarray, n_classes: int) -> dict:
    """Exhaustive search over features and midpoint thresholds."""
    n, d = X.shape
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    weighted = onehot * w[:, None]
    totals = weighted.sum(axis=0)

    # fallback stump: no split, both sides predict the weighted majority
    majority = int(np.argmax(totals))
    best = {
        "feature": 0,
        "threshold": -np.inf,
        "left": majority,
        "right": majority,
        "mass": totals.max(),
    }
    for f in range(d):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cum = np.cumsum(weighted[order], axis=0)
        boundaries = np.nonzero(xs[:-1] < xs[1:])[0]
        if len(boundaries) == 0:
            continue
        left_mass = cum[boundaries].max(axis=1)
        right_mass = (totals[None, :] - cum[boundaries]).max(axis=1)
        mass = left_mass + right_mass
        k = int(np.argmax(mass))
        if mass[k] > best["mass"] + 1e-15:
            s = boundaries[k]
            best = {
                "feature": f,
                "threshold": float((xs[s] + xs[s + 1]) / 2.0),
                "left": int(np.argmax(cum[s])),
                "right": int(np.argmax(totals - cum[s])),
                "mass": float(mass[k]),
            }
    best.pop("mass")
    return best


def _stump_predict(stump: dict, X: np.ndarray) -> np.ndarray:
    side = X[:, stump["feature"]] <= stump["threshold"]
    return np.where(side, stump["left"], stump["right"])


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, params) -> tuple[dict, dict]:
    n = X.shape[0]
    w = np.full(n, 1.0 / n)
    stumps = []
    weight_sums = []
    for _ in range(params.rounds):
        stump = _fit_stump(X, y, w, n_classes)
        pred = _stump_predict(stump, X)
        miss = pred != y
        err = float(w[miss].sum())
        if err >= 1.0 - 1.0 / n_classes - 1e-12:
            break  # no better than random, boosting cannot continue
        err = max(err, _EPS)
        alpha = float(np.log((1.0 - err) / err) + np.log(n_classes - 1.0))
        stump["alpha"] = alpha
        stumps.append(stump)
        w = w * np.exp(alpha * miss)
        w = w / w.sum()
        weight_sums.append(float(w.sum()))
        if err <= _EPS:
            break  # perfect stump dominates all later votes
    if not stumps:
        # degenerate data: keep the majority stump with a flat vote
        stump = _fit_stump(X, y, w, n_classes)
        stump["alpha"] = 1.0
        stumps.append(stump)
    payload = {"stumps": stumps}
    return payload, {"weight_sums": weight_sums}


def scores(payload: dict, X: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((X.shape[0], n_classes))
    for stump in payload["stumps"]:
        pred = _stump_predict(stump, X)
        out[np.arange(X.shape[0]), pred] += stump["alpha"]
    return out
