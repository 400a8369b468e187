"""Multinomial logistic regression, full-batch descent with backtracking.

The step-size search only ever accepts a strict decrease (Armijo), so the
training loss is non-increasing across epochs.  A bias is handled by
augmenting the data with a constant column inside fit(); the gradient and
loss helpers below stay bias-agnostic so they can be checked directly
against finite differences.
"""

from __future__ import annotations

import numpy as np


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy_loss(W: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean softmax cross-entropy plus (l2/2) * ||W||^2."""
    logits = X @ W.T
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_probs = shifted[np.arange(len(y)), y] - log_norm
    return float(-log_probs.mean() + 0.5 * l2 * (W * W).sum())


def cross_entropy_gradient(W: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float) -> np.ndarray:
    """Gradient of cross_entropy_loss with respect to W (classes x features)."""
    n = X.shape[0]
    P = _softmax(X @ W.T)
    Y = np.zeros_like(P)
    Y[np.arange(n), y] = 1.0
    return (P - Y).T @ X / n + l2 * W


def fit(X: np.ndarray, y: np.ndarray, n_classes: int, params) -> tuple[dict, dict]:
    Xb = np.hstack([X, np.ones((X.shape[0], 1))])
    W = np.zeros((n_classes, Xb.shape[1]))
    losses = [cross_entropy_loss(W, Xb, y, params.l2)]
    step = 1.0
    for _ in range(params.max_epochs):
        G = cross_entropy_gradient(W, Xb, y, params.l2)
        gnorm_sq = float((G * G).sum())
        if np.sqrt(gnorm_sq) < params.grad_tol:
            break
        step = min(step * 2.0, 1e4)
        while step > 1e-12:
            candidate = W - step * G
            loss = cross_entropy_loss(candidate, Xb, y, params.l2)
            if loss <= losses[-1] - 1e-4 * step * gnorm_sq:
                break
            step /= 2.0
        else:
            break  # no descent step representable, already at the floor
        W = candidate
        losses.append(loss)
    payload = {"weights": W.tolist()}
    return payload, {"losses": losses}


def scores(payload: dict, X: np.ndarray, n_classes: int) -> np.ndarray:
    W = np.asarray(payload["weights"])
    Xb = np.hstack([X, np.ones((X.shape[0], 1))])
    return Xb @ W.T
