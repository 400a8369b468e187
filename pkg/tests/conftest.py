import os

import pytest

from gso.ontology import load_forest, propagate_scores

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")

LEXICON_PATH = os.path.join(DATA_DIR, "lexicon_fixture.jsonl")
PAPER_RATIO_PATH = os.path.join(DATA_DIR, "paper_ratio.gso.jsonl")
DURATION_PATH = os.path.join(DATA_DIR, "duration_17_82.gso.jsonl")


@pytest.fixture(scope="session")
def raw_forest():
    """Bundled fixture forest, scores as authored (some missing)."""
    return load_forest(LEXICON_PATH)


@pytest.fixture(scope="session")
def forest(raw_forest):
    """Bundled fixture forest with scores propagated."""
    return propagate_scores(raw_forest)
