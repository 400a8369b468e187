import numpy as np
import pytest

from gso.classifiers import cross_entropy_gradient, cross_entropy_loss


def finite_difference(W, X, y, l2, step=1e-5):
    grad = np.zeros_like(W)
    for i in range(W.shape[0]):
        for j in range(W.shape[1]):
            up = W.copy()
            down = W.copy()
            up[i, j] += step
            down[i, j] -= step
            grad[i, j] = (
                cross_entropy_loss(up, X, y, l2) - cross_entropy_loss(down, X, y, l2)
            ) / (2 * step)
    return grad


def test_zero_weights_balanced_two_class_rows_cancel():
    X = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    W = np.zeros((2, 2))
    G = cross_entropy_gradient(W, X, y, l2=0.0)
    # softmax rows sum to one, so class-gradient rows cancel across classes
    assert np.allclose(G.sum(axis=0), 0.0, atol=1e-12)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(5):
        n, d, k = 12, 4, 3
        X = rng.normal(size=(n, d))
        y = rng.integers(0, k, size=n)
        W = rng.normal(size=(k, d))
        l2 = float(rng.choice([0.0, 1e-4, 1e-2]))
        G = cross_entropy_gradient(W, X, y, l2)
        F = finite_difference(W, X, y, l2)
        rel = np.abs(G - F) / np.maximum(1e-8, np.abs(G) + np.abs(F))
        worst = max(worst, float(rel.max()))
    assert worst < 1e-4


def test_pure_regularizer_gradient_when_data_is_zero():
    rng = np.random.default_rng(5)
    W = rng.normal(size=(3, 4))
    X = np.zeros((6, 4))
    y = np.array([0, 1, 2, 0, 1, 2])
    G = cross_entropy_gradient(W, X, y, l2=0.5)
    assert np.allclose(G, 0.5 * W, atol=1e-15)


def test_loss_is_mean_cross_entropy_plus_penalty():
    # single instance, two classes, hand-evaluated softmax
    W = np.array([[1.0, 0.0], [0.0, 1.0]])
    X = np.array([[1.0, 1.0]])
    y = np.array([0])
    # logits (1, 1) -> probability 0.5, loss = ln 2 plus l2/2 * ||W||^2
    expected = np.log(2.0) + 0.05 * 2.0
    assert cross_entropy_loss(W, X, y, l2=0.1) == pytest.approx(expected)
