#!/usr/bin/env python3
"""Headline experiment: synthetic dataset at the published class ratios.

Generates 1869 instances at ratios (0.603, 0.078, 0.321) with 10% label
noise and 40% of the planted signal mass on VNP pairs, then runs stratified
10-fold cross-validation of SMO and Logistic over the three representation
filters, printing the ablation table.  Pass --full to run the whole
five-algorithm suite (slower, includes the selection tables).
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gso.classifiers import TrainParams
from gso.dataset import generate_synthetic
from gso.evaluation import FeatureConfig, SuiteConfig, cross_validate, run_suite
from gso.ontology import load_forest, propagate_scores

HERE = os.path.dirname(os.path.abspath(__file__))
LEXICON = os.path.join(HERE, "..", "data", "lexicon_fixture.jsonl")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=2015)
    parser.add_argument("--n", type=int, default=1869)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--noise-rate", type=float, default=0.10)
    parser.add_argument("--vnp-share", type=float, default=0.4)
    parser.add_argument("--full", action="store_true", help="run all five algorithms plus CFS tables")
    args = parser.parse_args()

    forest = propagate_scores(load_forest(LEXICON))
    ds = generate_synthetic(
        forest,
        args.n,
        (0.603, 0.078, 0.321),
        noise_rate=args.noise_rate,
        vnp_signal_share=args.vnp_share,
        seed=args.seed,
    )
    print(f"dataset: {len(ds)} instances, seed {args.seed}")

    if args.full:
        t0 = time.time()
        report = run_suite(ds, forest, SuiteConfig(k=args.k, seed=args.seed))
        print(report.render(paper_format=True))
        print(f"\nsuite wall time: {time.time() - t0:.1f}s")
        return

    t0 = time.time()
    print(f"{'algorithm':<10} {'ANP only':<10} {'VNP only':<10} {'SentiPair':<10}")
    for algo in ("smo", "logistic"):
        row = [algo]
        for rep in ("anp", "vnp", "sentipair"):
            r = cross_validate(
                ds, forest, TrainParams(algorithm=algo, seed=args.seed),
                k=args.k, seed=args.seed,
                feature_config=FeatureConfig(representation=rep),
            )
            row.append(f"{r.accuracy:.3f}")
        print(f"{row[0]:<10} {row[1]:<10} {row[2]:<10} {row[3]:<10}")
    print(f"\nablation wall time: {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
