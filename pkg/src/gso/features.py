"""Bag-of-words featurization over the pair vocabulary, plus CFS selection.

Feature order mirrors the canonical pair ordering from the ontology module,
so a vocabulary built twice from the same data is identical.  Selection is
correlation-based: symmetric uncertainty for both feature-class and
feature-feature correlation, combined by the usual subset merit and searched
with forward best-first (stall limit 5).
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset, SentimentLabel
from .errors import DegenerateInput, EmptyVocabulary, LengthMismatch
from .ontology import SentiPairSequence, SynsetForest, enumerate_pairs

FEATURE_MODES = ("binary", "count", "weighted")


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, value) entries; no explicit zeros."""

    entries: tuple[tuple[int, float], ...]
    dimension: int

    def __post_init__(self):
        last = -1
        for idx, value in self.entries:
            if idx <= last or idx >= self.dimension:
                raise ValueError("entries must be strictly increasing and within dimension")
            if value == 0.0:
                raise ValueError("no explicit zeros")
            last = idx

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        for idx, value in self.entries:
            out[idx] = value
        return out


@dataclass(frozen=True)
class FeatureSpace:
    """Ordered pair vocabulary with a feature mode and optional CFS mask."""

    vocabulary: tuple[str, ...]
    mode: str = "binary"
    weights: tuple[float, ...] = ()  # pair weight per vocabulary entry
    selected: Optional[tuple[bool, ...]] = None

    def __post_init__(self):
        if self.mode not in FEATURE_MODES:
            raise ValueError(f"mode must be one of {FEATURE_MODES}")
        if len(set(self.vocabulary)) != len(self.vocabulary):
            raise ValueError("vocabulary keys must be unique")
        if self.weights and len(self.weights) != len(self.vocabulary):
            raise ValueError("weights length must match vocabulary")
        if self.selected is not None and len(self.selected) != len(self.vocabulary):
            raise ValueError("selection mask length must match vocabulary")

    @property
    def dimension(self) -> int:
        if self.selected is None:
            return len(self.vocabulary)
        return sum(self.selected)

    def index_map(self) -> dict[str, int]:
        """Pair key -> output index, honoring the selection mask."""
        if self.selected is None:
            return {key: i for i, key in enumerate(self.vocabulary)}
        out = {}
        j = 0
        for key, keep in zip(self.vocabulary, self.selected):
            if keep:
                out[key] = j
                j += 1
        return out

    def with_selection(self, indices: Sequence[int]) -> "FeatureSpace":
        mask = [False] * len(self.vocabulary)
        for i in indices:
            mask[i] = True
        return replace(self, selected=tuple(mask))

    def to_json(self) -> dict:
        return {
            "vocabulary": list(self.vocabulary),
            "mode": self.mode,
            "weights": list(self.weights),
            "selected": None if self.selected is None else [int(b) for b in self.selected],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FeatureSpace":
        return cls(
            vocabulary=tuple(obj["vocabulary"]),
            mode=obj["mode"],
            weights=tuple(obj["weights"]),
            selected=None if obj["selected"] is None else tuple(bool(b) for b in obj["selected"]),
        )


def save_space(space: FeatureSpace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(space.to_json(), fh, sort_keys=True)
        fh.write("\n")


def load_space(path: str) -> FeatureSpace:
    with open(path, encoding="utf-8") as fh:
        return FeatureSpace.from_json(json.load(fh))


def build_vocabulary(
    train: Dataset,
    min_freq: int = 1,
    mode: str = "binary",
    forest: Optional[SynsetForest] = None,
    representation: str = "sentipair",
) -> FeatureSpace:
    """Vocabulary of pairs occurring at least min_freq times, canonical order.

    representation filters the pair stream before counting: "anp" keeps
    adjective pairs only, "vnp" verb pairs only, "sentipair" everything.
    """
    if representation not in ("sentipair", "anp", "vnp"):
        raise ValueError(f"unknown representation {representation!r}")
    if not len(train):
        raise EmptyVocabulary("cannot build a vocabulary from an empty dataset")
    occurrences: dict[str, int] = {}
    weights: dict[str, float] = {}
    kinds: dict[str, str] = {}
    for inst in train:
        for pair in inst.sequence:
            occurrences[pair.key] = occurrences.get(pair.key, 0) + 1
            weights[pair.key] = pair.weight
            kinds[pair.key] = pair.kind
    if representation != "sentipair":
        wanted = "ANP" if representation == "anp" else "VNP"
        occurrences = {k: v for k, v in occurrences.items() if kinds[k] == wanted}
    kept = {k for k, v in occurrences.items() if v >= min_freq}
    if not kept:
        raise EmptyVocabulary(
            f"no pair reaches min_freq={min_freq}"
            + ("" if representation == "sentipair" else f" under the {representation} filter")
        )
    if forest is not None:
        ordered = [p.key for p in enumerate_pairs(forest) if p.key in kept]
        missing = kept.difference(ordered)
        ordered += sorted(missing)  # pairs valid at load time but outside the forest vocabulary
    else:
        ordered = sorted(kept)
    return FeatureSpace(
        vocabulary=tuple(ordered),
        mode=mode,
        weights=tuple(weights[k] for k in ordered),
    )


def featurize(seq: SentiPairSequence, space: FeatureSpace) -> SparseVector:
    """BoW vector; occurrence order is deliberately discarded."""
    index = space.index_map()
    counts: dict[int, float] = {}
    for pair in seq:
        i = index.get(pair.key)
        if i is None:
            continue  # unknown at train time, contributes nothing
        counts[i] = counts.get(i, 0.0) + 1.0
    if space.mode == "binary":
        entries = [(i, 1.0) for i in sorted(counts)]
    elif space.mode == "count":
        entries = [(i, counts[i]) for i in sorted(counts)]
    else:
        # weighted: count times the pair weight recorded at vocabulary build
        inverse = {v: k for k, v in index.items()}
        key_weight = dict(zip(space.vocabulary, space.weights))
        entries = []
        for i in sorted(counts):
            value = counts[i] * key_weight[inverse[i]]
            if value != 0.0:
                entries.append((i, value))
    return SparseVector(entries=tuple(entries), dimension=space.dimension)


def featurize_dataset(ds: Dataset, space: FeatureSpace, indices: Optional[Sequence[int]] = None) -> np.ndarray:
    """Dense matrix of featurized instances (row per instance)."""
    if indices is None:
        indices = range(len(ds))
    X = np.zeros((len(indices), space.dimension))
    for row, i in enumerate(indices):
        for idx, value in featurize(ds[i].sequence, space).entries:
            X[row, idx] = value
    return X


def label_vector(ds: Dataset, indices: Sequence[int]) -> np.ndarray:
    from .dataset import LABEL_ORDER

    order = {label: i for i, label in enumerate(LABEL_ORDER)}
    return np.array([order[ds[i].label] for i in indices], dtype=np.int64)


# --- symmetric uncertainty -----------------------------------------------------

def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def symmetric_uncertainty(a: Sequence[int], b: Sequence[int]) -> float:
    """SU(a, b) = 2 I(a;b) / (H(a) + H(b)); zero when either column is constant."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
        raise LengthMismatch(f"columns must be equal-length 1-d, got {a.shape} and {b.shape}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    na, nb = ai.max() + 1, bi.max() + 1
    joint = np.zeros((na, nb))
    np.add.at(joint, (ai, bi), 1.0)
    ha = _entropy(joint.sum(axis=1))
    hb = _entropy(joint.sum(axis=0))
    if ha == 0.0 or hb == 0.0:
        return 0.0
    hab = _entropy(joint.ravel())
    mutual = ha + hb - hab
    return float(2.0 * mutual / (ha + hb))


# --- correlation-based subset selection ----------------------------------------

def subset_merit(rcf_sum: float, rff_sum: float, k: int) -> float:
    """Merit of a k-feature subset from summed correlations.

    rcf_sum is the sum of feature-class SU over the subset; rff_sum the sum
    over unordered feature pairs inside it.
    """
    if k == 0:
        return 0.0
    denom = math.sqrt(k + 2.0 * rff_sum)
    if denom == 0.0:
        return 0.0
    return rcf_sum / denom


@dataclass
class CfsResult:
    selected: list[int]   # canonical (ascending) feature order
    merit: float
    expansions: int = 0
    evaluated: int = 0


class _CorrelationCache:
    """Lazy SU lookups over binarized columns."""

    def __init__(self, X: np.ndarray, y: np.ndarray):
        self.X = (np.asarray(X) != 0).astype(np.int8)
        self.y = np.asarray(y)
        self._rcf: dict[int, float] = {}
        self._rff: dict[tuple[int, int], float] = {}

    def rcf(self, i: int) -> float:
        if i not in self._rcf:
            self._rcf[i] = symmetric_uncertainty(self.X[:, i], self.y)
        return self._rcf[i]

    def rff(self, i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        if key not in self._rff:
            self._rff[key] = symmetric_uncertainty(self.X[:, key[0]], self.X[:, key[1]])
        return self._rff[key]


def cfs_select(X: np.ndarray, y: Sequence[int], stall_limit: int = 5) -> CfsResult:
    """Forward best-first search for the highest-merit feature subset.

    Features are binarized to presence before correlation.  The search keeps
    a priority queue of frontier subsets, expands the best one by each
    unused feature, and stops once stall_limit consecutive expansions fail
    to improve on the best subset seen.  Ties prefer the lexicographically
    smaller subset, which makes the outcome order-independent.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise LengthMismatch(f"X {X.shape} does not match y of length {len(y)}")
    if len(np.unique(y)) < 2:
        raise DegenerateInput("feature selection needs at least two classes")
    d = X.shape[1]
    cache = _CorrelationCache(X, y)

    best_subset: tuple[int, ...] = ()
    best_merit = 0.0
    expansions = 0
    evaluated = 0
    stall = 0

    # heap entries: (-merit, subset, rcf_sum, rff_sum)
    heap: list[tuple[float, tuple[int, ...], float, float]] = [(0.0, (), 0.0, 0.0)]
    seen = {()}

    while heap and stall < stall_limit:
        _, subset, rcf_sum, rff_sum = heapq.heappop(heap)
        improved = False
        expansions += 1
        current = set(subset)
        for f in range(d):
            if f in current:
                continue
            child = tuple(sorted(subset + (f,)))
            if child in seen:
                continue
            seen.add(child)
            child_rcf = rcf_sum + cache.rcf(f)
            child_rff = rff_sum + sum(cache.rff(f, g) for g in subset)
            merit = subset_merit(child_rcf, child_rff, len(child))
            evaluated += 1
            if merit > best_merit + 1e-12:
                best_merit = merit
                best_subset = child
                improved = True
            elif abs(merit - best_merit) <= 1e-12 and best_subset and child < best_subset:
                best_subset = child
            heapq.heappush(heap, (-merit, child, child_rcf, child_rff))
        stall = 0 if improved else stall + 1

    return CfsResult(
        selected=list(best_subset),
        merit=best_merit,
        expansions=expansions,
        evaluated=evaluated,
    )
