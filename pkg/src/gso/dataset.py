"""GSO-2015 dataset records: load/save, statistics, splits, synthetic oracle.

One JSON record per line, extension ``.gso.jsonl``::

    {"gif_id": "...", "pairs": [{"modifier": id, "noun": id}, ...],
     "label": "positive", "duration_s": 12.4, "noise_flags": ["motion_blur"]}

The order of the ``pairs`` array is the occurrence order within the GIF.
``cant_judge`` records stay on disk but never enter a training or
evaluation matrix.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ClassTooSmall, InvalidRatio, ParseError, UnresolvedPair
from .ontology import (
    SentiPair,
    SentiPairSequence,
    SynsetForest,
    ValidationReport,
    VNP,
    enumerate_pairs,
    validate_sequence,
)


class SentimentLabel(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    CANT_JUDGE = "cant_judge"

    def render(self) -> str:
        return {
            SentimentLabel.POSITIVE: "Positive",
            SentimentLabel.NEGATIVE: "Negative",
            SentimentLabel.NEUTRAL: "Neutral",
            SentimentLabel.CANT_JUDGE: "Can't Judge",
        }[self]


# canonical order everywhere a matrix or report is indexed by class
LABEL_ORDER = (SentimentLabel.POSITIVE, SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL)

NOISE_FLAGS = ("mixed_content", "explanative_text", "motion_blur", "illumination_change")


@dataclass(frozen=True)
class AnnotatedInstance:
    gif_id: str
    sequence: SentiPairSequence
    label: SentimentLabel
    duration_s: Optional[float] = None
    noise_flags: tuple[str, ...] = ()

    def to_record(self) -> dict:
        record = {
            "gif_id": self.gif_id,
            "pairs": [{"modifier": m, "noun": n} for m, n in self.sequence.id_pairs()],
            "label": self.label.value,
        }
        if self.duration_s is not None:
            record["duration_s"] = self.duration_s
        if self.noise_flags:
            record["noise_flags"] = list(self.noise_flags)
        return record


@dataclass
class Dataset:
    instances: list[AnnotatedInstance] = field(default_factory=list)
    dropped_pairs: int = 0  # lenient-mode counter
    dropped_by_kind: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def __getitem__(self, i: int) -> AnnotatedInstance:
        return self.instances[i]

    def labeled_indices(self) -> list[int]:
        """Indices of instances that carry one of the three trainable classes."""
        return [
            i for i, inst in enumerate(self.instances)
            if inst.label != SentimentLabel.CANT_JUDGE
        ]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(instances=[self.instances[i] for i in indices])


@dataclass(frozen=True)
class DatasetStats:
    total: int
    counts: dict[str, int]                 # all four label values
    proportions: dict[str, float]          # three labeled classes, sum to 1
    duration_mean: Optional[float]
    duration_min: Optional[float]
    duration_max: Optional[float]
    noise_proportions: dict[str, float]    # flag -> fraction of all instances
    length_histogram: dict[int, int]

    def render(self) -> str:
        lines = ["label            count  share"]
        for label in LABEL_ORDER:
            count = self.counts.get(label.value, 0)
            share = self.proportions.get(label.value)
            share_txt = f"{100 * share:5.1f}%" if share is not None else "    - "
            lines.append(f"{label.render():<15} {count:6d}  {share_txt}")
        cj = self.counts.get(SentimentLabel.CANT_JUDGE.value, 0)
        if cj:
            lines.append(f"{SentimentLabel.CANT_JUDGE.render():<15} {cj:6d}      -")
        if self.duration_mean is not None:
            lines.append(
                f"duration_s       mean {self.duration_mean:.2f}"
                f"  min {self.duration_min:.2f}  max {self.duration_max:.2f}"
            )
        for flag in NOISE_FLAGS:
            if flag in self.noise_proportions:
                lines.append(f"noise {flag:<22} {100 * self.noise_proportions[flag]:5.1f}%")
        hist = " ".join(f"{k}:{v}" for k, v in sorted(self.length_histogram.items()))
        lines.append(f"sequence length histogram  {hist}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "counts": self.counts,
            "proportions": self.proportions,
            "duration": {
                "mean": self.duration_mean,
                "min": self.duration_min,
                "max": self.duration_max,
            },
            "noise_proportions": self.noise_proportions,
            "length_histogram": {str(k): v for k, v in sorted(self.length_histogram.items())},
        }


# --- load / save -------------------------------------------------------------

def _parse_record(obj: dict, lineno: int) -> tuple[str, list[tuple[str, str]], SentimentLabel, Optional[float], tuple[str, ...]]:
    if not isinstance(obj, dict):
        raise ParseError("record must be an object", lineno)
    try:
        gif_id = str(obj["gif_id"])
        raw_label = obj["label"]
        raw_pairs = obj["pairs"]
    except KeyError as e:
        raise ParseError(f"missing field {e.args[0]!r}", lineno) from None
    try:
        label = SentimentLabel(raw_label)
    except ValueError:
        raise ParseError(f"unknown label {raw_label!r}", lineno) from None
    if not isinstance(raw_pairs, list):
        raise ParseError("pairs must be an array", lineno)
    pairs = []
    for entry in raw_pairs:
        if not isinstance(entry, dict) or "modifier" not in entry or "noun" not in entry:
            raise ParseError("each pair needs modifier and noun ids", lineno)
        pairs.append((str(entry["modifier"]), str(entry["noun"])))
    duration = obj.get("duration_s")
    if duration is not None:
        duration = float(duration)
        if duration < 0:
            raise ParseError("duration_s must be non-negative", lineno)
    flags = tuple(obj.get("noise_flags", ()))
    for flag in flags:
        if flag not in NOISE_FLAGS:
            raise ParseError(f"unknown noise flag {flag!r}", lineno)
    return gif_id, pairs, label, duration, flags


def load_dataset(path: str, forest: SynsetForest, mode: str = "strict") -> Dataset:
    """Load a ``.gso.jsonl`` file, resolving every pair against the forest.

    strict: any unresolvable pair raises UnresolvedPair with its line.
    lenient: unresolvable pairs are dropped and counted on the dataset.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be strict or lenient, got {mode!r}")
    ds = Dataset()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ParseError(f"not valid JSON: {e.msg}", lineno) from None
            gif_id, raw_pairs, label, duration, flags = _parse_record(obj, lineno)
            result = validate_sequence(raw_pairs, forest)
            if isinstance(result, ValidationReport):
                if mode == "strict":
                    first = result.issues[0]
                    raise UnresolvedPair(first.message, lineno, first.position, first.kind)
                bad = {issue.position for issue in result.issues}
                for issue in result.issues:
                    ds.dropped_by_kind[issue.kind] = ds.dropped_by_kind.get(issue.kind, 0) + 1
                ds.dropped_pairs += len(bad)
                kept = [p for i, p in enumerate(raw_pairs) if i not in bad]
                result = validate_sequence(kept, forest)
                assert isinstance(result, SentiPairSequence)
            ds.instances.append(
                AnnotatedInstance(
                    gif_id=gif_id,
                    sequence=result,
                    label=label,
                    duration_s=duration,
                    noise_flags=flags,
                )
            )
    return ds


def write_dataset(ds: Dataset, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in ds.instances:
            fh.write(json.dumps(inst.to_record(), sort_keys=True) + "\n")


# --- statistics ---------------------------------------------------------------

def compute_stats(ds: Dataset) -> DatasetStats:
    counts = {label.value: 0 for label in SentimentLabel}
    for inst in ds.instances:
        counts[inst.label.value] += 1
    labeled_total = sum(counts[label.value] for label in LABEL_ORDER)
    proportions = {}
    if labeled_total:
        proportions = {
            label.value: counts[label.value] / labeled_total for label in LABEL_ORDER
        }
    durations = [i.duration_s for i in ds.instances if i.duration_s is not None]
    noise = {}
    if ds.instances:
        for flag in NOISE_FLAGS:
            n = sum(1 for i in ds.instances if flag in i.noise_flags)
            if n:
                noise[flag] = n / len(ds.instances)
    hist: dict[int, int] = {}
    for inst in ds.instances:
        hist[len(inst.sequence)] = hist.get(len(inst.sequence), 0) + 1
    return DatasetStats(
        total=len(ds.instances),
        counts={k: v for k, v in counts.items() if v or k != SentimentLabel.CANT_JUDGE.value},
        proportions=proportions,
        duration_mean=sum(durations) / len(durations) if durations else None,
        duration_min=min(durations) if durations else None,
        duration_max=max(durations) if durations else None,
        noise_proportions=noise,
        length_histogram=hist,
    )


# --- stratified k-fold ---------------------------------------------------------

def stratified_kfold(ds: Dataset, k: int, seed: int) -> list[tuple[list[int], list[int]]]:
    """Disjoint, exhaustive folds over the labeled (non cant_judge) indices.

    Per-class membership is shuffled with the seed and dealt round-robin, so
    each fold's class counts differ from a proportional share by at most one
    instance.  Deterministic for a fixed seed.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    by_class: dict[SentimentLabel, list[int]] = {}
    for i in ds.labeled_indices():
        by_class.setdefault(ds.instances[i].label, []).append(i)
    for label, members in sorted(by_class.items(), key=lambda kv: kv[0].value):
        if len(members) < k:
            raise ClassTooSmall(
                f"class {label.value} has {len(members)} members, fewer than k={k}"
            )
    rng = np.random.default_rng(seed)
    test_folds: list[list[int]] = [[] for _ in range(k)]
    for label in LABEL_ORDER:
        members = by_class.get(label)
        if not members:
            continue
        order = rng.permutation(len(members))
        for j, idx in enumerate(order):
            test_folds[j % k].append(members[idx])
    folds = []
    for f in range(k):
        test = sorted(test_folds[f])
        test_set = set(test)
        train = [i for i in ds.labeled_indices() if i not in test_set]
        folds.append((train, test))
    return folds


# --- synthetic oracle -----------------------------------------------------------

# |planted sum| below this band is labeled neutral; chosen so unit-scale
# weights can reach all three classes
NEUTRAL_DEAD_ZONE = 0.25


@dataclass(frozen=True)
class PlantedSignal:
    """Pair-key -> weight map plus the exact labeling rule it induces."""

    weights: Mapping[str, float]
    kinds: Mapping[str, str]  # pair key -> ANP | VNP
    dead_zone: float = NEUTRAL_DEAD_ZONE

    def classify(self, pair_keys: Sequence[str]) -> SentimentLabel:
        """The exact sign rule: distinct planted pairs, summed weights."""
        total = sum(self.weights.get(key, 0.0) for key in set(pair_keys))
        if total >= self.dead_zone:
            return SentimentLabel.POSITIVE
        if total <= -self.dead_zone:
            return SentimentLabel.NEGATIVE
        return SentimentLabel.NEUTRAL

    def mass_by_kind(self) -> dict[str, float]:
        mass = {"ANP": 0.0, "VNP": 0.0}
        for key, w in self.weights.items():
            mass[self.kinds[key]] += abs(w)
        return mass


def build_planted_signal(
    forest: SynsetForest,
    vnp_signal_share: float,
    seed: int,
    n_pairs: int = 20,
    total_mass: float = 10.0,
) -> PlantedSignal:
    """Plant weights on a deterministic pair subset of the forest vocabulary.

    Exactly vnp_signal_share of the total absolute weight mass goes to VNP
    pairs (all of it when the share is 1, none when 0).  Within each kind,
    weights alternate sign so every class is reachable from either kind.
    """
    if not 0.0 <= vnp_signal_share <= 1.0:
        raise ValueError("vnp_signal_share must lie in [0, 1]")
    pairs = enumerate_pairs(forest)
    anps = [p for p in pairs if p.kind == "ANP"]
    vnps = [p for p in pairs if p.kind == VNP]
    n_vnp = int(round(vnp_signal_share * n_pairs))
    if 0.0 < vnp_signal_share < 1.0:
        n_vnp = min(max(n_vnp, 1), n_pairs - 1)
    n_anp = n_pairs - n_vnp
    if n_anp > len(anps) or n_vnp > len(vnps):
        raise ValueError("forest vocabulary too small for the requested planted pairs")
    rng = np.random.default_rng(seed)
    chosen_anp = [anps[i] for i in sorted(rng.choice(len(anps), size=n_anp, replace=False))]
    chosen_vnp = [vnps[i] for i in sorted(rng.choice(len(vnps), size=n_vnp, replace=False))]
    weights: dict[str, float] = {}
    kinds: dict[str, str] = {}
    for chosen, kind, mass in (
        (chosen_anp, "ANP", (1.0 - vnp_signal_share) * total_mass),
        (chosen_vnp, VNP, vnp_signal_share * total_mass),
    ):
        if not chosen or mass == 0.0:
            continue
        magnitude = mass / len(chosen)
        for i, pair in enumerate(chosen):
            sign = 1.0 if i % 2 == 0 else -1.0
            weights[pair.key] = sign * magnitude
            kinds[pair.key] = kind
    return PlantedSignal(weights=weights, kinds=kinds)


def _class_counts(n: int, ratios: Sequence[float]) -> list[int]:
    if len(ratios) != 3:
        raise InvalidRatio(f"expected three ratios, got {len(ratios)}")
    if any(r < 0 for r in ratios):
        raise InvalidRatio("ratios must be non-negative")
    total = sum(ratios)
    # percentages republished at one decimal may be off by a little; anything
    # further from 1 is a caller bug
    if abs(total - 1.0) > 0.01:
        raise InvalidRatio(f"ratios sum to {total}, not 1")
    # rounded per class, so slightly inexact ratios shift the generated total
    # rather than silently distorting a class
    return [int(math.floor(n * r + 0.5)) for r in ratios]


def generate_synthetic(
    forest: SynsetForest,
    n: int,
    class_ratios: Sequence[float],
    *,
    signal: Optional[Mapping[str, float]] = None,
    noise_rate: float = 0.0,
    vnp_signal_share: float = 0.5,
    seed: int = 0,
    n_distractors: int = 20,
) -> Dataset:
    """Synthetic GSO-2015 dataset whose labels follow an exact planted rule.

    Each instance's label is determined by the sign of the summed planted
    weights of its pairs (dead zone around 0 maps to neutral), then flipped
    to a uniformly random different class with probability noise_rate.
    When ``signal`` is not supplied, a planted map is built so that
    ``vnp_signal_share`` of the absolute weight mass sits on VNP pairs.
    """
    if not 0.0 <= noise_rate <= 1.0:
        raise ValueError("noise_rate must lie in [0, 1]")
    counts = _class_counts(n, class_ratios)
    if signal is None:
        planted = build_planted_signal(forest, vnp_signal_share, seed)
    else:
        kinds = {}
        for key in signal:
            mod, _ = key.split("|", 1)
            kinds[key] = "ANP" if forest.get(mod).pos == "adjective" else VNP
        planted = PlantedSignal(weights=dict(signal), kinds=kinds)

    rng = np.random.default_rng(seed)
    pools: dict[str, dict[str, list[str]]] = {
        "ANP": {"pos": [], "neg": []},
        VNP: {"pos": [], "neg": []},
    }
    for key in sorted(planted.weights):
        w = planted.weights[key]
        if w > 0:
            pools[planted.kinds[key]]["pos"].append(key)
        elif w < 0:
            pools[planted.kinds[key]]["neg"].append(key)

    planted_keys = set(planted.weights)
    vocabulary = enumerate_pairs(forest)
    free = [p.key for p in vocabulary if p.key not in planted_keys]
    if not free:
        raise ValueError("forest vocabulary leaves no room for distractor pairs")
    idx = rng.choice(len(free), size=min(n_distractors, len(free)), replace=False)
    distractor_keys = [free[i] for i in sorted(idx)]

    dz = planted.dead_zone

    def pool_mass(kind: str, side: str) -> float:
        return sum(abs(planted.weights[k]) for k in pools[kind][side])

    def feasible(kind: str, target: SentimentLabel) -> bool:
        if target == SentimentLabel.NEUTRAL:
            return True  # the empty selection sums to zero
        side = "pos" if target == SentimentLabel.POSITIVE else "neg"
        return pool_mass(kind, side) >= dz

    def pick(pool: list[str], size: int) -> list[str]:
        chosen = rng.choice(len(pool), size=size, replace=False)
        return [pool[i] for i in chosen]

    def sample_planted(kind: str, target: SentimentLabel) -> list[str]:
        pos_pool, neg_pool = pools[kind]["pos"], pools[kind]["neg"]
        if target == SentimentLabel.NEUTRAL:
            limit = min(len(pos_pool), len(neg_pool))
            for _ in range(8):
                b = int(rng.integers(0, limit + 1))
                if b == 0:
                    return []
                cand = pick(pos_pool, b) + pick(neg_pool, b)
                if abs(sum(planted.weights[k] for k in cand)) < dz:
                    return cand
            return []
        main, counter = (pos_pool, neg_pool) if target == SentimentLabel.POSITIVE else (neg_pool, pos_pool)
        order = rng.permutation(len(main))
        chosen: list[str] = []
        mass = 0.0
        for i in order:
            chosen.append(main[i])
            mass += abs(planted.weights[main[i]])
            if mass >= dz:
                break
        spare = [main[i] for i in order[len(chosen):]]
        extra = int(rng.integers(0, min(2, len(spare)) + 1))
        for key in spare[:extra]:
            chosen.append(key)
            mass += abs(planted.weights[key])
        # counter-sign pairs are allowed as long as the rule still holds
        for i in rng.permutation(len(counter)):
            w = abs(planted.weights[counter[i]])
            if mass - w >= dz and rng.random() < 0.3:
                chosen.append(counter[i])
                mass -= w
        return chosen

    key_to_pair = {p.key: p for p in vocabulary}
    label_cycle = [SentimentLabel.POSITIVE, SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL]
    instances: list[AnnotatedInstance] = []
    serial = 0
    for target, count in zip(label_cycle, counts):
        for _ in range(count):
            kind = VNP if rng.random() < vnp_signal_share else "ANP"
            if not feasible(kind, target):
                kind = "ANP" if kind == VNP else VNP
            if not feasible(kind, target):
                raise ValueError(f"planted signal cannot express a {target.value} instance")
            chosen = sample_planted(kind, target)
            n_extra = int(rng.integers(0, 4))
            extras = [distractor_keys[i] for i in rng.integers(0, len(distractor_keys), size=n_extra)]
            keys = chosen + extras
            rng.shuffle(keys)
            label = planted.classify(keys)
            assert label == target, "planted construction must satisfy its own rule"
            if noise_rate > 0.0 and rng.random() < noise_rate:
                others = [l for l in label_cycle if l != label]
                label = others[int(rng.integers(0, len(others)))]
            pairs = tuple(key_to_pair[k] for k in keys)
            instances.append(
                AnnotatedInstance(
                    gif_id=f"synth-{serial:05d}",
                    sequence=SentiPairSequence(pairs=pairs),
                    label=label,
                    duration_s=round(float(rng.uniform(1.0, 35.0)), 2),
                )
            )
            serial += 1
    order = rng.permutation(len(instances))
    return Dataset(instances=[instances[i] for i in order])
