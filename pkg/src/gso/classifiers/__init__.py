"""Five from-scratch classifiers behind one train/predict contract."""

from .base import (
    ALGORITHMS,
    TrainParams,
    TrainedModel,
    canonical_label_order,
    decision_scores,
    deserialize_model,
    load_model,
    normalize_algorithm,
    predict,
    predict_matrix,
    save_model,
    serialize_model,
    train,
)
from .logistic import cross_entropy_gradient, cross_entropy_loss
from .smo import SmoResult, dual_objective, kkt_max_violation, smo_solve

__all__ = [
    "ALGORITHMS",
    "TrainParams",
    "TrainedModel",
    "SmoResult",
    "canonical_label_order",
    "cross_entropy_gradient",
    "cross_entropy_loss",
    "decision_scores",
    "deserialize_model",
    "dual_objective",
    "kkt_max_violation",
    "load_model",
    "normalize_algorithm",
    "predict",
    "predict_matrix",
    "save_model",
    "serialize_model",
    "smo_solve",
    "train",
]
