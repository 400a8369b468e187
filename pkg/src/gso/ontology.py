"""Synset forest and SentiPair construction.

The forest is three rooted trees (adjective, verb, noun) of sentiment-scored
synsets.  SentiPairs combine a modifier synset (adjective or verb) with a noun
synset; ordered lists of them form SentiPair sequences, one per GIF.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Optional

from .errors import (
    CrossPosParent,
    CycleDetected,
    DanglingParent,
    DiscrepancyViolation,
    EmptyTree,
    InvalidPos,
    MissingScore,
    MultipleRoots,
    NotAModifier,
    NotANoun,
    ScoreOutOfRange,
    UnknownSynset,
    UnscoredRoot,
)

POS_VALUES = ("adjective", "verb", "noun")
MODIFIER_POS = ("adjective", "verb")

ANP = "ANP"
VNP = "VNP"


@dataclass(frozen=True)
class Synset:
    """One word sense with an optional sentiment score in [-1, +1]."""

    id: str
    lemma: str
    sense: int
    pos: str
    gloss: str = ""
    score: Optional[float] = None
    parent: Optional[str] = None

    @property
    def is_root(self) -> bool:
        return self.parent is None


@dataclass(frozen=True)
class TreeStats:
    pos: str
    count: int
    max_depth: int  # nodes on the longest root path; a lone root has depth 1
    leaf_count: int
    scored_count: int


@dataclass(frozen=True)
class SynsetForest:
    """Immutable, validated forest.  Safe to share across threads."""

    synsets: Mapping[str, Synset]
    roots: Mapping[str, str]  # pos -> root synset id

    def __iter__(self) -> Iterator[Synset]:
        return iter(self.synsets.values())

    def __len__(self) -> int:
        return len(self.synsets)

    def get(self, synset_id: str) -> Synset:
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise UnknownSynset(f"unknown synset id: {synset_id!r}") from None

    def members(self, pos: str) -> list[Synset]:
        return [s for s in self.synsets.values() if s.pos == pos]

    def children(self, synset_id: str) -> list[Synset]:
        return [s for s in self.synsets.values() if s.parent == synset_id]

    def depth(self, synset_id: str) -> int:
        node = self.get(synset_id)
        d = 1
        while node.parent is not None:
            node = self.synsets[node.parent]
            d += 1
        return d

    def tree_stats(self) -> dict[str, TreeStats]:
        stats = {}
        parents = {s.parent for s in self.synsets.values() if s.parent}
        for pos in POS_VALUES:
            members = self.members(pos)
            stats[pos] = TreeStats(
                pos=pos,
                count=len(members),
                max_depth=max(self.depth(s.id) for s in members),
                leaf_count=sum(1 for s in members if s.id not in parents),
                scored_count=sum(1 for s in members if s.score is not None),
            )
        return stats

    def to_records(self) -> list[dict]:
        """Flat records in the lexicon file schema, deterministically ordered."""
        out = []
        for s in sorted(self.synsets.values(), key=lambda s: (s.pos, s.lemma, s.sense)):
            out.append(
                {
                    "id": s.id,
                    "lemma": s.lemma,
                    "sense": s.sense,
                    "pos": s.pos,
                    "gloss": s.gloss,
                    "score": s.score,
                    "parent": s.parent,
                }
            )
        return out


@dataclass(frozen=True)
class SentiPair:
    """(modifier, noun) pair; ANP when the modifier is an adjective, VNP for a verb."""

    modifier: str
    noun: str
    kind: str
    weight: float

    @property
    def key(self) -> str:
        return pair_key(self.modifier, self.noun)

    def display_name(self, forest: SynsetForest) -> str:
        mod = forest.get(self.modifier).lemma
        noun = forest.get(self.noun).lemma
        # ANPs read modifier-first ("cute dog"); VNPs noun-first ("girl frown").
        return f"{mod} {noun}" if self.kind == ANP else f"{noun} {mod}"


def pair_key(modifier_id: str, noun_id: str) -> str:
    return f"{modifier_id}|{noun_id}"


def split_pair_key(key: str) -> tuple[str, str]:
    modifier_id, noun_id = key.split("|", 1)
    return modifier_id, noun_id


@dataclass(frozen=True)
class SentiPairSequence:
    """SentiPairs in occurrence order; duplicates allowed, order preserved."""

    pairs: tuple[SentiPair, ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentiPair]:
        return iter(self.pairs)

    def keys(self) -> list[str]:
        return [p.key for p in self.pairs]

    def id_pairs(self) -> list[tuple[str, str]]:
        return [(p.modifier, p.noun) for p in self.pairs]


@dataclass
class SequenceIssue:
    position: int
    kind: str  # error code from make_pair
    message: str


@dataclass
class ValidationReport:
    issues: list[SequenceIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


# --- lexicon parsing and forest construction --------------------------------

_REQUIRED_FIELDS = ("id", "lemma", "sense", "pos")


def parse_lexicon(lines: Iterable[str], source: str = "<lexicon>") -> list[Synset]:
    """Parse JSON-Lines synset records. Raises ValueError with line context."""
    records = []
    for lineno, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ValueError(f"{source}:{lineno}: not valid JSON: {e}") from None
        if not isinstance(obj, dict):
            raise ValueError(f"{source}:{lineno}: record must be an object")
        for key in _REQUIRED_FIELDS:
            if key not in obj:
                raise ValueError(f"{source}:{lineno}: missing field {key!r}")
        sense = obj["sense"]
        if not isinstance(sense, int) or sense < 1:
            raise ValueError(f"{source}:{lineno}: sense must be an integer >= 1")
        score = obj.get("score")
        if score is not None and not isinstance(score, (int, float)):
            raise ValueError(f"{source}:{lineno}: score must be a number or null")
        records.append(
            Synset(
                id=str(obj["id"]),
                lemma=str(obj["lemma"]).lower(),
                sense=sense,
                pos=str(obj["pos"]).lower(),
                gloss=str(obj.get("gloss", "")),
                score=None if score is None else float(score),
                parent=obj.get("parent"),
            )
        )
    return records


def build_forest(synsets: Iterable[Synset]) -> SynsetForest:
    """Validate synsets into a forest of exactly one rooted tree per pos.

    Raises the named LexiconError subclass for the first violated structural
    rule; the returned forest satisfies every SynsetForest invariant.
    """
    synsets = list(synsets)
    by_id: dict[str, Synset] = {}
    for s in synsets:
        if s.pos not in POS_VALUES:
            raise InvalidPos(f"{s.id}: pos {s.pos!r} not one of {POS_VALUES}")
        if s.score is not None and not -1.0 <= s.score <= 1.0:
            raise ScoreOutOfRange(f"{s.id}: score {s.score} outside [-1, +1]")
        if s.id in by_id:
            raise DiscrepancyViolation(f"duplicate synset id {s.id!r}")
        by_id[s.id] = s

    # discrepancy criterion: (lemma, sense) unique within a tree
    seen: dict[tuple[str, str, int], str] = {}
    for s in synsets:
        key = (s.pos, s.lemma, s.sense)
        if key in seen:
            raise DiscrepancyViolation(
                f"{s.id}: duplicate lemma+sense {s.lemma!r}#{s.sense} in {s.pos} tree"
                f" (already {seen[key]})"
            )
        seen[key] = s.id

    roots: dict[str, str] = {}
    for pos in POS_VALUES:
        members = [s for s in synsets if s.pos == pos]
        if not members:
            raise EmptyTree(f"no {pos} synsets")
        pos_roots = [s for s in members if s.parent is None]
        if len(pos_roots) > 1:
            ids = ", ".join(sorted(r.id for r in pos_roots))
            raise MultipleRoots(f"{pos} tree has several roots: {ids}")
        if not pos_roots:
            raise CycleDetected(f"{pos} tree has no parentless synset")
        roots[pos] = pos_roots[0].id

    for s in synsets:
        if s.parent is None:
            continue
        parent = by_id.get(s.parent)
        if parent is None:
            raise DanglingParent(f"{s.id}: parent {s.parent!r} not found")
        if parent.pos != s.pos:
            raise CrossPosParent(
                f"{s.id} ({s.pos}) points at parent {parent.id} ({parent.pos})"
            )

    # every non-root must reach its root; a finite walk that revisits a node loops
    for s in synsets:
        visited = {s.id}
        node = s
        while node.parent is not None:
            node = by_id[node.parent]
            if node.id in visited:
                raise CycleDetected(f"parent chain through {s.id!r} loops at {node.id!r}")
            visited.add(node.id)
        if node.id != roots[s.pos]:
            raise CycleDetected(f"{s.id} does not reach the {s.pos} root")

    return SynsetForest(synsets=dict(by_id), roots=roots)


def load_forest(path: str) -> SynsetForest:
    with open(path, encoding="utf-8") as fh:
        return build_forest(parse_lexicon(fh, source=path))


def save_forest(forest: SynsetForest, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in forest.to_records():
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def propagate_scores(forest: SynsetForest) -> SynsetForest:
    """Fill missing scores from the nearest scored ancestor.

    Roots must be scored.  Present scores are left untouched, so the
    operation is idempotent.
    """
    for pos, root_id in forest.roots.items():
        if forest.synsets[root_id].score is None:
            raise UnscoredRoot(f"{pos} root {root_id!r} has no score")

    resolved: dict[str, float] = {}

    def resolve(s: Synset) -> float:
        if s.id in resolved:
            return resolved[s.id]
        if s.score is not None:
            value = s.score
        else:
            value = resolve(forest.synsets[s.parent])
        resolved[s.id] = value
        return value

    new_synsets = {}
    for s in forest.synsets.values():
        new_synsets[s.id] = s if s.score is not None else replace(s, score=resolve(s))
    return SynsetForest(synsets=new_synsets, roots=dict(forest.roots))


# --- pairs -------------------------------------------------------------------

def pair_weight(modifier_score: float, noun_score: float) -> float:
    """Additive combination clamped to [-1, +1]; the modifier drives sentiment."""
    return max(-1.0, min(1.0, modifier_score + noun_score))


def make_pair(modifier_id: str, noun_id: str, forest: SynsetForest) -> SentiPair:
    modifier = forest.get(modifier_id)
    noun = forest.get(noun_id)
    if noun.pos != "noun":
        raise NotANoun(f"{noun_id}: pos {noun.pos!r}, expected noun")
    if modifier.pos not in MODIFIER_POS:
        raise NotAModifier(f"{modifier_id}: pos {modifier.pos!r}, expected adjective or verb")
    if modifier.score is None or noun.score is None:
        missing = modifier_id if modifier.score is None else noun_id
        raise MissingScore(f"{missing}: no sentiment score; propagate scores first")
    kind = ANP if modifier.pos == "adjective" else VNP
    return SentiPair(
        modifier=modifier_id,
        noun=noun_id,
        kind=kind,
        weight=pair_weight(modifier.score, noun.score),
    )


def enumerate_pairs(forest: SynsetForest, max_pairs: Optional[int] = None) -> list[SentiPair]:
    """All modifier x noun combinations over non-root synsets.

    Tree roots are placeholders, not vocabulary.  Order is canonical:
    (kind, modifier lemma, modifier sense, noun lemma, noun sense), which
    fixes the pair vocabulary across runs.
    """
    root_ids = set(forest.roots.values())
    modifiers = [
        s for s in forest.synsets.values()
        if s.pos in MODIFIER_POS and s.id not in root_ids
    ]
    nouns = [
        s for s in forest.synsets.values()
        if s.pos == "noun" and s.id not in root_ids
    ]
    modifiers.sort(key=lambda s: (s.pos != "adjective", s.lemma, s.sense))
    nouns.sort(key=lambda s: (s.lemma, s.sense))
    pairs = [
        make_pair(m.id, n.id, forest)
        for m in modifiers
        for n in nouns
    ]
    if max_pairs is not None:
        pairs = pairs[:max_pairs]
    return pairs


def validate_sequence(
    raw_pairs: Iterable[tuple[str, str]], forest: SynsetForest
) -> SentiPairSequence | ValidationReport:
    """Either a valid sequence in input order or a report of offending positions."""
    pairs = []
    issues = []
    for position, (modifier_id, noun_id) in enumerate(raw_pairs):
        try:
            pairs.append(make_pair(modifier_id, noun_id, forest))
        except (UnknownSynset, NotANoun, NotAModifier, MissingScore) as e:
            issues.append(SequenceIssue(position=position, kind=e.code, message=str(e)))
    if issues:
        return ValidationReport(issues=issues)
    return SentiPairSequence(pairs=tuple(pairs))


def search_synsets(
    forest: SynsetForest, query: str, pos: Optional[str] = None
) -> list[Synset]:
    """Case-insensitive lemma-prefix search, ordered by (lemma, sense)."""
    prefix = query.lower()
    hits = [
        s for s in forest.synsets.values()
        if (pos is None or s.pos == pos) and s.lemma.startswith(prefix)
    ]
    hits.sort(key=lambda s: (s.lemma, s.sense, s.pos))
    return hits
