"""Error taxonomy shared across the package.

Every domain failure raises a subclass of :class:`GsoError`.  The class name
doubles as the machine-readable error code (``error.code``) used by the CLI
and the annotation service, so names here are part of the wire contract.
"""

from __future__ import annotations


class GsoError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- ontology -------------------------------------------------------------

class LexiconError(GsoError):
    """A lexicon file cannot be turned into a valid forest."""


class DiscrepancyViolation(LexiconError):
    """Duplicate (lemma, sense) inside one tree."""


class ScoreOutOfRange(LexiconError):
    """Sentiment score outside [-1, +1]."""


class DanglingParent(LexiconError):
    """Parent id does not resolve."""


class CrossPosParent(LexiconError):
    """Parent belongs to a different part-of-speech tree."""


class MultipleRoots(LexiconError):
    """More than one parentless synset for a part of speech."""


class EmptyTree(LexiconError):
    """A part of speech has no synsets at all."""


class CycleDetected(LexiconError):
    """Parent chain loops, so some node never reaches the root."""


class InvalidPos(LexiconError):
    """Part of speech outside {adjective, verb, noun}."""


class UnscoredRoot(GsoError):
    """Score propagation needs every root to carry a score."""


class UnknownSynset(GsoError):
    """Synset id not present in the forest."""


class NotANoun(GsoError):
    """Pair noun slot filled with a non-noun synset."""


class NotAModifier(GsoError):
    """Pair modifier slot filled with a synset that is neither adjective nor verb."""


class MissingScore(GsoError):
    """Pair construction requires both synset scores to be present."""


# --- dataset ----------------------------------------------------------------

class ParseError(GsoError):
    """Malformed dataset record; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnresolvedPair(GsoError):
    """Strict-mode load hit a pair that does not validate against the forest."""

    def __init__(self, message: str, line: int, position: int, kind: str):
        super().__init__(f"line {line}, pair {position}: {message}")
        self.line = line
        self.position = position
        self.kind = kind  # code of the underlying ontology error


class ClassTooSmall(GsoError):
    """A class has fewer members than the number of folds."""


class InvalidRatio(GsoError):
    """Class ratios malformed (wrong arity, negative, or not summing to 1)."""


# --- features ---------------------------------------------------------------

class EmptyVocabulary(GsoError):
    """No pair survived the frequency threshold."""


class LengthMismatch(GsoError):
    """Columns of different lengths."""


class DegenerateInput(GsoError):
    """Feature selection needs at least two classes."""


# --- classifiers ------------------------------------------------------------

class SingleClass(GsoError):
    """Training data contains a single class."""


class DimensionMismatch(GsoError):
    """Vector or matrix dimension differs from the model's."""


class NonFiniteFeature(GsoError):
    """NaN or infinity in the feature matrix."""


class VersionMismatch(GsoError):
    """Model file written by an incompatible format version."""


# --- evaluation -------------------------------------------------------------

class EmptyMatrix(GsoError):
    """Metrics need at least one evaluated instance."""


# --- annotation service -----------------------------------------------------

class UnknownWorker(GsoError):
    """Worker id not in the configured roster."""


class UnknownTask(GsoError):
    """No task for the given gif id."""


class InvalidSequence(GsoError):
    """Submitted sequence failed validation; carries per-position details."""

    def __init__(self, message: str, positions: list[dict]):
        super().__init__(message)
        self.positions = positions


class NoAnnotations(GsoError):
    """Consolidation requires at least one annotation."""
