"""Uniform train/predict contract and deterministic model serialization.

All five algorithms take a dense feature matrix plus string labels, and
produce a TrainedModel whose payload is plain JSON data.  Identical inputs
(including the seed) serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..dataset import LABEL_ORDER
from ..errors import (
    DimensionMismatch,
    NonFiniteFeature,
    SingleClass,
    VersionMismatch,
)

ALGORITHMS = ("naive_bayes", "smo", "logistic", "adaboost", "random_forest")

# accepted spellings for CLI/config convenience
_ALGORITHM_ALIASES = {
    "naivebayes": "naive_bayes",
    "naive_bayes": "naive_bayes",
    "nb": "naive_bayes",
    "smo": "smo",
    "svm": "smo",
    "logistic": "logistic",
    "adaboost": "adaboost",
    "randomforest": "random_forest",
    "random_forest": "random_forest",
    "rand.forest": "random_forest",
    "rf": "random_forest",
}

MODEL_FORMAT_VERSION = 1


def normalize_algorithm(name: str) -> str:
    key = name.strip().lower().replace("-", "_").replace(" ", "")
    key = _ALGORITHM_ALIASES.get(key, key)
    if key not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")
    return key


@dataclass(frozen=True)
class TrainParams:
    algorithm: str
    seed: int = 0
    # naive bayes
    alpha: float = 1.0
    # smo
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 200
    # logistic
    l2: float = 1e-4
    max_epochs: int = 500
    grad_tol: float = 1e-6
    # adaboost
    rounds: int = 10
    # random forest
    n_trees: int = 100
    max_features: Optional[int] = None  # None means ceil(sqrt(d))
    bootstrap: bool = True

    def __post_init__(self):
        object.__setattr__(self, "algorithm", normalize_algorithm(self.algorithm))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_passes < 1 or self.max_epochs < 1:
            raise ValueError("iteration budgets must be at least 1")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be at least 1")

    def echo(self) -> dict:
        fields = {
            "naive_bayes": ("alpha",),
            "smo": ("C", "tol", "max_passes"),
            "logistic": ("l2", "max_epochs", "grad_tol"),
            "adaboost": ("rounds",),
            "random_forest": ("n_trees", "max_features", "bootstrap"),
        }[self.algorithm]
        out = {"algorithm": self.algorithm, "seed": self.seed}
        out.update({k: getattr(self, k) for k in fields})
        return out


@dataclass
class TrainedModel:
    algorithm: str
    labels: tuple[str, ...]
    dimension: int
    params: dict
    payload: dict
    diagnostics: dict = field(default_factory=dict)  # never serialized

    def to_json(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "algorithm": self.algorithm,
            "labels": list(self.labels),
            "dimension": self.dimension,
            "params": self.params,
            "payload": self.payload,
        }


def canonical_label_order(labels: Sequence[str]) -> tuple[str, ...]:
    """Sentiment labels keep their fixed order; anything else sorts."""
    present = sorted(set(labels))
    sentiment = [l.value for l in LABEL_ORDER]
    if all(l in sentiment for l in present):
        return tuple(l for l in sentiment if l in present)
    return tuple(present)


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {X.shape}")
    return X


def train(X, y: Sequence[str], params: TrainParams) -> TrainedModel:
    from . import adaboost, logistic, naive_bayes, random_forest, smo

    X = _as_matrix(X)
    y = [str(label) for label in y]
    if X.shape[0] != len(y):
        raise DimensionMismatch(f"{X.shape[0]} rows but {len(y)} labels")
    if not np.all(np.isfinite(X)):
        raise NonFiniteFeature("feature matrix contains NaN or infinity")
    labels = canonical_label_order(y)
    if len(labels) < 2:
        raise SingleClass(f"training data has a single class: {labels}")
    index = {label: i for i, label in enumerate(labels)}
    y_idx = np.array([index[label] for label in y], dtype=np.int64)

    trainer = {
        "naive_bayes": naive_bayes.fit,
        "smo": smo.fit_ovo,
        "logistic": logistic.fit,
        "adaboost": adaboost.fit,
        "random_forest": random_forest.fit,
    }[params.algorithm]
    payload, diagnostics = trainer(X, y_idx, len(labels), params)
    return TrainedModel(
        algorithm=params.algorithm,
        labels=labels,
        dimension=X.shape[1],
        params=params.echo(),
        payload=payload,
        diagnostics=diagnostics,
    )


def decision_scores(model: TrainedModel, X) -> np.ndarray:
    """Per-class scores; the predicted class is the canonical argmax."""
    from . import adaboost, logistic, naive_bayes, random_forest, smo

    X = _as_matrix(X)
    if X.shape[1] != model.dimension:
        raise DimensionMismatch(
            f"model expects dimension {model.dimension}, got {X.shape[1]}"
        )
    scorer = {
        "naive_bayes": naive_bayes.scores,
        "smo": smo.scores_ovo,
        "logistic": logistic.scores,
        "adaboost": adaboost.scores,
        "random_forest": random_forest.scores,
    }[model.algorithm]
    return scorer(model.payload, X, len(model.labels))


def predict_matrix(model: TrainedModel, X) -> list[str]:
    s = decision_scores(model, X)
    return [model.labels[i] for i in np.argmax(s, axis=1)]


def predict(model: TrainedModel, x) -> str:
    """Single-vector prediction; accepts a SparseVector or a dense row."""
    if hasattr(x, "to_dense"):
        x = x.to_dense()
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.dimension:
        raise DimensionMismatch(
            f"model expects dimension {model.dimension}, got shape {x.shape}"
        )
    return predict_matrix(model, x.reshape(1, -1))[0]


# --- serialization -------------------------------------------------------------

def serialize_model(model: TrainedModel) -> str:
    return json.dumps(model.to_json(), sort_keys=True, separators=(",", ":"))


def deserialize_model(text: str) -> TrainedModel:
    obj = json.loads(text)
    version = obj.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise VersionMismatch(
            f"model format {version!r}, this build reads {MODEL_FORMAT_VERSION}"
        )
    return TrainedModel(
        algorithm=obj["algorithm"],
        labels=tuple(obj["labels"]),
        dimension=obj["dimension"],
        params=obj["params"],
        payload=obj["payload"],
    )


def save_model(model: TrainedModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(model))
        fh.write("\n")


def load_model(path: str) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        return deserialize_model(fh.read())
