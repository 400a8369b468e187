"""Sequential minimal optimization for the linear soft-margin SVM dual.

Binary subproblems are solved by repeatedly picking the maximal violating
pair of the box-constrained dual and stepping it analytically, which keeps
the equality constraint sum(alpha_i y_i) = 0 exact by construction and stops
precisely when every point satisfies the KKT conditions within tol.
Multiclass goes through one-vs-one voting.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


@dataclass
class SmoResult:
    alphas: np.ndarray
    bias: float
    converged: bool
    iterations: int


def smo_solve(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 200,
    gram: np.ndarray | None = None,
) -> SmoResult:
    """Maximize the dual with a linear kernel.

    y must be -1/+1.  The iteration budget is max_passes sweeps worth of
    pair updates (max_passes * n); exhausting it returns the best iterate
    with converged=False rather than raising.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if C <= 0:
        raise ValueError("C must be positive")
    n = len(y)
    K = gram if gram is not None else X @ X.T
    alphas = np.zeros(n)
    f0 = np.zeros(n)  # sum_j alpha_j y_j K(x_j, x_i), bias-free margin
    positive = y > 0

    max_iterations = max(1, max_passes) * n
    iterations = 0
    converged = False
    m = M = 0.0
    while iterations < max_iterations:
        v = y - f0
        up = np.where(positive, alphas < C, alphas > 0.0)
        low = np.where(positive, alphas > 0.0, alphas < C)
        up_vals = np.where(up, v, -np.inf)
        low_vals = np.where(low, v, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m, M = v[i], v[j]
        if m - M <= tol:
            converged = True
            break
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        cap_i = C - alphas[i] if positive[i] else alphas[i]
        cap_j = alphas[j] if positive[j] else C - alphas[j]
        step = min(cap_i, cap_j)
        if eta > 0.0:
            step = min(step, (m - M) / eta)
        alphas[i] += y[i] * step
        alphas[j] -= y[j] * step
        # exact box bounds keep the index-set logic sharp
        alphas[i] = min(max(alphas[i], 0.0), C)
        alphas[j] = min(max(alphas[j], 0.0), C)
        f0 += step * (K[:, i] - K[:, j])
        iterations += 1

    bias = float((m + M) / 2.0) if np.isfinite(m) and np.isfinite(M) else 0.0
    return SmoResult(alphas=alphas, bias=bias, converged=converged, iterations=iterations)


def dual_objective(alphas: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij."""
    u = alphas * y
    return float(alphas.sum() - 0.5 * u @ K @ u)


def kkt_max_violation(
    X: np.ndarray, y: np.ndarray, alphas: np.ndarray, bias: float, C: float
) -> float:
    """Largest KKT violation over the training points; <= tol at convergence."""
    w = X.T @ (alphas * y)
    margins = y * (X @ w + bias)
    violation = np.zeros(len(y))
    at_zero = alphas <= 1e-9
    at_c = alphas >= C - 1e-9
    interior = ~(at_zero | at_c)
    violation[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
    violation[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
    violation[interior] = np.abs(margins[interior] - 1.0)
    return float(violation.max()) if len(y) else 0.0


def fit_ovo(X: np.ndarray, y: np.ndarray, n_classes: int, params) -> tuple[dict, dict]:
    """One-vs-one linear SVMs; vote ties break by class frequency then order."""
    class_counts = [int((y == c).sum()) for c in range(n_classes)]
    machines = []
    diagnostics = {"converged": [], "iterations": []}
    for a, b in combinations(range(n_classes), 2):
        rows = np.where((y == a) | (y == b))[0]
        Xab = X[rows]
        yab = np.where(y[rows] == a, 1.0, -1.0)
        result = smo_solve(Xab, yab, C=params.C, tol=params.tol, max_passes=params.max_passes)
        w = Xab.T @ (result.alphas * yab)
        machines.append(
            {
                "positive": a,
                "negative": b,
                "w": w.tolist(),
                "b": result.bias,
            }
        )
        diagnostics["converged"].append(result.converged)
        diagnostics["iterations"].append(result.iterations)
    payload = {"machines": machines, "class_counts": class_counts}
    return payload, diagnostics


def scores_ovo(payload: dict, X: np.ndarray, n_classes: int) -> np.ndarray:
    votes = np.zeros((X.shape[0], n_classes))
    for machine in payload["machines"]:
        w = np.asarray(machine["w"])
        decision = X @ w + machine["b"]
        a, b = machine["positive"], machine["negative"]
        votes[:, a] += decision >= 0
        votes[:, b] += decision < 0
    # frequency tie-break: strictly less than one vote so it can never
    # overturn an actual vote difference
    counts = np.asarray(payload["class_counts"], dtype=float)
    if counts.max() > 0:
        votes = votes + (counts / counts.max())[None, :] * 0.5
    return votes
