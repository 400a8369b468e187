"""Metrics, leakage-free cross-validation, and the three-table experiment grid.

Reports pool one confusion matrix across folds (micro), since headline
numbers are single values per algorithm.  The machine-readable form is
canonical JSON, so identical configurations and seeds produce identical
bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classifiers import TrainParams, predict_matrix, train
from .dataset import Dataset, LABEL_ORDER, stratified_kfold
from .errors import EmptyMatrix
from .features import build_vocabulary, cfs_select, featurize_dataset, label_vector
from .ontology import SynsetForest

CLASS_NAMES = tuple(label.value for label in LABEL_ORDER)
REPRESENTATIONS = ("sentipair", "anp", "vnp")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed [true class][predicted class] in canonical label order."""

    counts: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = CLASS_NAMES

    @classmethod
    def from_pairs(cls, truths: Sequence[str], predictions: Sequence[str],
                   labels: Sequence[str] = CLASS_NAMES) -> "ConfusionMatrix":
        index = {label: i for i, label in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for t, p in zip(truths, predictions):
            counts[index[t], index[p]] += 1
        return cls(counts=tuple(tuple(int(v) for v in row) for row in counts),
                   labels=tuple(labels))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.as_array().sum())

    def add(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        assert self.labels == other.labels
        summed = self.as_array() + other.as_array()
        return ConfusionMatrix(
            counts=tuple(tuple(int(v) for v in row) for row in summed),
            labels=self.labels,
        )


@dataclass
class EvalReport:
    confusion: ConfusionMatrix
    per_class: dict[str, dict[str, float]]  # label -> precision/recall/f1/support
    precision: float  # support-weighted
    recall: float
    f1: float
    accuracy: float
    config: dict = field(default_factory=dict)
    folds: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "confusion": {
                "labels": list(self.confusion.labels),
                "counts": [list(row) for row in self.confusion.counts],
            },
            "per_class": self.per_class,
            "weighted": {
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
            },
            "accuracy": self.accuracy,
            "config": self.config,
            "folds": self.folds,
        }

    def render(self) -> str:
        lines = [
            "class      prec   recall f1     support",
        ]
        for label in self.confusion.labels:
            m = self.per_class[label]
            lines.append(
                f"{label:<10} {m['precision']:<6.3f} {m['recall']:<6.3f}"
                f" {m['f1']:<6.3f} {int(m['support'])}"
            )
        lines.append(
            f"weighted   {self.precision:<6.3f} {self.recall:<6.3f} {self.f1:<6.3f}"
            f" {self.confusion.total}"
        )
        lines.append(f"accuracy   {self.accuracy:.3f}")
        return "\n".join(lines)


def metrics(cm: ConfusionMatrix, config: Optional[dict] = None) -> EvalReport:
    """Per-class and support-weighted precision/recall/F1 plus accuracy.

    Empty denominators follow the zero convention, so weighted recall always
    equals accuracy (each true instance contributes its diagonal share).
    """
    counts = cm.as_array()
    total = counts.sum()
    if total == 0:
        raise EmptyMatrix("confusion matrix has no entries")
    support = counts.sum(axis=1).astype(float)
    predicted = counts.sum(axis=0).astype(float)
    diag = np.diag(counts).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(predicted > 0, diag / predicted, 0.0)
        recall = np.where(support > 0, diag / support, 0.0)
        f1 = np.where(
            precision + recall > 0,
            2 * precision * recall / (precision + recall),
            0.0,
        )
    weights = support / total
    per_class = {
        label: {
            "precision": float(precision[i]),
            "recall": float(recall[i]),
            "f1": float(f1[i]),
            "support": float(support[i]),
        }
        for i, label in enumerate(cm.labels)
    }
    return EvalReport(
        confusion=cm,
        per_class=per_class,
        precision=float((weights * precision).sum()),
        recall=float((weights * recall).sum()),
        f1=float((weights * f1).sum()),
        accuracy=float(diag.sum() / total),
        config=dict(config or {}),
    )


# --- cross-validation ------------------------------------------------------------

@dataclass(frozen=True)
class FeatureConfig:
    mode: str = "binary"
    min_freq: int = 1
    representation: str = "sentipair"
    cfs: bool = False

    def echo(self) -> dict:
        return {
            "mode": self.mode,
            "min_freq": self.min_freq,
            "representation": self.representation,
            "cfs": self.cfs,
        }


def fit_fold(
    ds: Dataset,
    train_idx: Sequence[int],
    forest: SynsetForest,
    feature_config: FeatureConfig,
    params: TrainParams,
):
    """Vocabulary, selection and model fitted on the train fold only."""
    space = build_vocabulary(
        ds.subset(train_idx),
        min_freq=feature_config.min_freq,
        mode=feature_config.mode,
        forest=forest,
        representation=feature_config.representation,
    )
    if feature_config.cfs:
        X = featurize_dataset(ds, space, train_idx)
        y = label_vector(ds, train_idx)
        result = cfs_select(X, y)
        if result.selected:
            space = space.with_selection(result.selected)
    X = featurize_dataset(ds, space, train_idx)
    y_labels = [ds[i].label.value for i in train_idx]
    model = train(X, y_labels, params)
    return space, model


def cross_validate(
    ds: Dataset,
    forest: SynsetForest,
    params: TrainParams,
    k: int = 10,
    seed: int = 0,
    feature_config: FeatureConfig = FeatureConfig(),
) -> EvalReport:
    folds = stratified_kfold(ds, k, seed)
    pooled = ConfusionMatrix.from_pairs([], [])
    fold_details = []
    for fold_no, (train_idx, test_idx) in enumerate(folds):
        space, model = fit_fold(ds, train_idx, forest, feature_config, params)
        X_test = featurize_dataset(ds, space, test_idx)
        predictions = predict_matrix(model, X_test)
        truths = [ds[i].label.value for i in test_idx]
        cm = ConfusionMatrix.from_pairs(truths, predictions)
        pooled = pooled.add(cm)
        fold_details.append(
            {
                "fold": fold_no,
                "train_size": len(train_idx),
                "test_size": len(test_idx),
                "vocabulary_size": len(space.vocabulary),
                "selected": None if space.selected is None else int(space.dimension),
                "accuracy": metrics(cm).accuracy,
            }
        )
    config = {
        "algorithm": params.algorithm,
        "params": params.echo(),
        "k": k,
        "seed": seed,
        "features": feature_config.echo(),
    }
    report = metrics(pooled, config)
    report.folds = fold_details
    return report


# --- experiment suite -------------------------------------------------------------

TABLE_ALGORITHMS = ("naive_bayes", "smo", "logistic", "adaboost", "random_forest")
ABLATION_ALGORITHMS = ("smo", "logistic", "random_forest")

ALGORITHM_DISPLAY = {
    "naive_bayes": "Naive Bayes",
    "smo": "SMO",
    "logistic": "Logistic",
    "adaboost": "AdaBoost",
    "random_forest": "Rand.Forest",
}

REPRESENTATION_DISPLAY = {"anp": "ANP only", "vnp": "VNP only", "sentipair": "SentiPair"}


@dataclass(frozen=True)
class SuiteConfig:
    k: int = 10
    seed: int = 0
    mode: str = "binary"
    min_freq: int = 1
    algorithms: tuple[str, ...] = TABLE_ALGORITHMS
    ablation_algorithms: tuple[str, ...] = ABLATION_ALGORITHMS


@dataclass
class SuiteReport:
    baseline: dict[str, EvalReport]          # algorithm -> plain BoW report
    selected: dict[str, EvalReport]          # algorithm -> CFS report
    ablation: dict[str, dict[str, dict[str, EvalReport]]]  # cfs on/off -> repr -> algo
    config: dict

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "baseline": {a: r.to_json() for a, r in self.baseline.items()},
            "selected": {a: r.to_json() for a, r in self.selected.items()},
            "ablation": {
                variant: {
                    rep: {a: r.to_json() for a, r in cells.items()}
                    for rep, cells in grid.items()
                }
                for variant, grid in self.ablation.items()
            },
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def _metric_table(self, cells: dict[str, EvalReport], caption: str) -> str:
        lines = [caption, f"{'Algorithm':<12} Prec.  Recall FScore Acc."]
        for algo, report in cells.items():
            lines.append(
                f"{ALGORITHM_DISPLAY[algo]:<12} {report.precision:.3f}  {report.recall:.3f}"
                f"  {report.f1:.3f}  {report.accuracy:.3f}"
            )
        return "\n".join(lines)

    def _ablation_table(self, variant: str, caption: str) -> str:
        algos = self.config["ablation_algorithms"]
        grid = self.ablation[variant]
        lines = [caption, f"{'Type':<10} " + " ".join(f"{ALGORITHM_DISPLAY[a]:<12}" for a in algos)]
        for rep in ("anp", "vnp", "sentipair"):
            cells = grid[rep]
            row = f"{REPRESENTATION_DISPLAY[rep]:<10} "
            row += " ".join(f"{cells[a].accuracy:<12.3f}" for a in algos)
            lines.append(row)
        return "\n".join(lines)

    def render(self, paper_format: bool = False) -> str:
        if paper_format:
            # rows and columns laid out exactly like the three result tables
            return "\n\n".join(
                [
                    self._metric_table(self.baseline, "Table 1: Accuracy without attribute selection"),
                    self._metric_table(self.selected, "Table 2: Accuracy with Correlation Based Subset"),
                    self._ablation_table("cfs_on", "Table 3: Accuracy with Correlation Based Subset"),
                ]
            )
        return "\n\n".join(
            [
                self._metric_table(self.baseline, "Accuracy without attribute selection"),
                self._metric_table(self.selected, "Accuracy with correlation-based subset"),
                self._ablation_table("cfs_off", "Representation ablation (without selection)"),
                self._ablation_table("cfs_on", "Representation ablation (with selection)"),
            ]
        )


def run_suite(
    ds: Dataset,
    forest: SynsetForest,
    config: SuiteConfig = SuiteConfig(),
) -> SuiteReport:
    """The full grid: algorithms x selection on/off x representation filter."""

    def cell(algorithm: str, cfs: bool, representation: str) -> EvalReport:
        params = TrainParams(algorithm=algorithm, seed=config.seed)
        fc = FeatureConfig(
            mode=config.mode,
            min_freq=config.min_freq,
            representation=representation,
            cfs=cfs,
        )
        return cross_validate(ds, forest, params, k=config.k, seed=config.seed, feature_config=fc)

    baseline = {a: cell(a, False, "sentipair") for a in config.algorithms}
    selected = {a: cell(a, True, "sentipair") for a in config.algorithms}
    ablation = {}
    for variant, cfs in (("cfs_off", False), ("cfs_on", True)):
        grid: dict[str, dict[str, EvalReport]] = {}
        for rep in ("anp", "vnp", "sentipair"):
            grid[rep] = {}
            for algo in config.ablation_algorithms:
                if rep == "sentipair":
                    source = selected if cfs else baseline
                    if algo in source:
                        grid[rep][algo] = source[algo]
                        continue
                grid[rep][algo] = cell(algo, cfs, rep)
        ablation[variant] = grid
    return SuiteReport(
        baseline=baseline,
        selected=selected,
        ablation=ablation,
        config={
            "k": config.k,
            "seed": config.seed,
            "mode": config.mode,
            "min_freq": config.min_freq,
            "algorithms": list(config.algorithms),
            "ablation_algorithms": list(config.ablation_algorithms),
        },
    )
