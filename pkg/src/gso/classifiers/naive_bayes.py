"""Multinomial naive Bayes over occurrence counts.

Binary presence features are a special case of counts, so the same model
covers both default feature modes.  Laplace smoothing keeps every stored
log-likelihood finite.
"""

from __future__ import annotations

import numpy as np


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, params) -> tuple[dict, dict]:
    if np.any(X < 0):
        raise ValueError("multinomial naive Bayes needs non-negative features")
    n, d = X.shape
    alpha = params.alpha
    token_counts = np.zeros((n_classes, d))
    class_counts = np.zeros(n_classes)
    for c in range(n_classes):
        rows = X[y == c]
        token_counts[c] = rows.sum(axis=0)
        class_counts[c] = rows.shape[0]
    log_likelihood = np.log(token_counts + alpha) - np.log(
        token_counts.sum(axis=1, keepdims=True) + alpha * d
    )
    log_priors = np.log(class_counts / n)
    payload = {
        "log_priors": log_priors.tolist(),
        "log_likelihood": log_likelihood.tolist(),
    }
    return payload, {}


def scores(payload: dict, X: np.ndarray, n_classes: int) -> np.ndarray:
    log_priors = np.asarray(payload["log_priors"])
    log_likelihood = np.asarray(payload["log_likelihood"])
    return log_priors[None, :] + X @ log_likelihood.T
