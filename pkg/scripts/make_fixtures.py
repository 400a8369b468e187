#!/usr/bin/env python3
"""Regenerate the dataset fixtures committed under data/.

Outputs are deterministic, so rerunning this script leaves the repo clean.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gso.dataset import (
    AnnotatedInstance,
    Dataset,
    SentimentLabel,
    compute_stats,
    generate_synthetic,
    write_dataset,
)
from gso.ontology import SentiPairSequence, load_forest, make_pair, propagate_scores

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

# class counts of the published training-set statistics
PAPER_COUNTS = (1124, 146, 599)
PAPER_TOTAL = sum(PAPER_COUNTS)


def main() -> None:
    forest = propagate_scores(load_forest(os.path.join(DATA, "lexicon_fixture.jsonl")))

    ratios = tuple(c / PAPER_TOTAL for c in PAPER_COUNTS)
    paper_ratio = generate_synthetic(
        forest, PAPER_TOTAL, ratios, noise_rate=0.0, vnp_signal_share=0.4, seed=2015
    )
    stats = compute_stats(paper_ratio)
    assert [stats.counts[k] for k in ("positive", "negative", "neutral")] == list(PAPER_COUNTS)
    write_dataset(paper_ratio, os.path.join(DATA, "paper_ratio.gso.jsonl"))
    print("paper_ratio.gso.jsonl:", len(paper_ratio), "instances")

    # every duration equal to the corpus-wide mean reported for the raw crawl
    cute_dog = make_pair("cute.a.01", "dog.n.01", forest)
    smile_girl = make_pair("smile.v.01", "girl.n.01", forest)
    constant = Dataset(
        instances=[
            AnnotatedInstance(
                gif_id=f"const-{i:03d}",
                sequence=SentiPairSequence(pairs=(cute_dog, smile_girl)[: 1 + i % 2]),
                label=(SentimentLabel.POSITIVE, SentimentLabel.NEUTRAL, SentimentLabel.NEGATIVE)[i % 3],
                duration_s=17.82,
            )
            for i in range(30)
        ]
    )
    write_dataset(constant, os.path.join(DATA, "duration_17_82.gso.jsonl"))
    print("duration_17_82.gso.jsonl:", len(constant), "instances")


if __name__ == "__main__":
    main()
