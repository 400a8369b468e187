"""Command-line entry point for the whole pipeline.

Exit codes: 0 success, 1 domain error (named error printed on stderr),
2 usage error (argparse).  Every command that touches randomness takes
--seed; rerunning with the same seed writes byte-identical files.
Input paths that do not exist are also tried under $GSO_DATA_DIR.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import dataset as ds_mod
from . import features as feat_mod
from .classifiers import TrainParams, load_model, predict_matrix, save_model, train
from .errors import GsoError
from .evaluation import FeatureConfig, SuiteConfig, cross_validate, metrics, run_suite
from .ontology import (
    enumerate_pairs,
    load_forest,
    propagate_scores,
    save_forest,
    search_synsets,
    validate_sequence,
)


def _resolve(path: str) -> str:
    if os.path.exists(path):
        return path
    base = os.environ.get("GSO_DATA_DIR")
    if base:
        candidate = os.path.join(base, path)
        if os.path.exists(candidate):
            return candidate
    return path


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _load_forest(args, propagate: bool = True):
    forest = load_forest(_resolve(args.forest))
    return propagate_scores(forest) if propagate else forest


# --- forest ---------------------------------------------------------------------

def cmd_forest_build(args) -> int:
    forest = load_forest(_resolve(args.lexicon))
    if not args.no_propagate:
        forest = propagate_scores(forest)
    if args.out:
        save_forest(forest, args.out)
    stats = forest.tree_stats()
    payload = {
        pos: {"count": s.count, "max_depth": s.max_depth, "leaves": s.leaf_count,
              "scored": s.scored_count}
        for pos, s in stats.items()
    }
    text = "\n".join(
        f"{pos:<10} count={s.count:<4} depth={s.max_depth:<3} leaves={s.leaf_count:<4}"
        f" scored={s.scored_count}"
        for pos, s in stats.items()
    )
    _emit(args, {"trees": payload, "out": args.out}, text)
    return 0


def cmd_forest_stats(args) -> int:
    forest = _load_forest(args, propagate=False)
    stats = forest.tree_stats()
    payload = {
        pos: {"count": s.count, "max_depth": s.max_depth, "leaves": s.leaf_count,
              "scored": s.scored_count}
        for pos, s in stats.items()
    }
    text = "\n".join(
        f"{pos:<10} count={s.count:<4} depth={s.max_depth:<3} leaves={s.leaf_count:<4}"
        f" scored={s.scored_count}"
        for pos, s in stats.items()
    )
    _emit(args, {"trees": payload}, text)
    return 0


def cmd_forest_search(args) -> int:
    forest = _load_forest(args, propagate=False)
    hits = search_synsets(forest, args.query, pos=args.pos)
    payload = {
        "synsets": [
            {"id": s.id, "lemma": s.lemma, "sense": s.sense, "pos": s.pos,
             "score": s.score, "gloss": s.gloss}
            for s in hits
        ]
    }
    text = "\n".join(f"{s.id:<20} {s.pos:<10} score={s.score}" for s in hits) or "(no matches)"
    _emit(args, payload, text)
    return 0


# --- pairs ----------------------------------------------------------------------

def cmd_pairs_enumerate(args) -> int:
    forest = _load_forest(args)
    pairs = enumerate_pairs(forest, max_pairs=args.max)
    payload = {
        "pairs": [
            {"modifier": p.modifier, "noun": p.noun, "kind": p.kind, "weight": p.weight}
            for p in pairs
        ]
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for p in pairs:
                fh.write(json.dumps(
                    {"modifier": p.modifier, "noun": p.noun, "kind": p.kind, "weight": p.weight},
                    sort_keys=True) + "\n")
    text = "\n".join(
        f"{p.kind} {p.display_name(forest):<24} weight={p.weight:+.2f}" for p in pairs[:50]
    )
    if len(pairs) > 50 and not args.json:
        text += f"\n... {len(pairs)} pairs total"
    _emit(args, payload, text)
    return 0


# --- dataset --------------------------------------------------------------------

def cmd_dataset_validate(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode=args.mode)
    payload = {
        "instances": len(data),
        "dropped_pairs": data.dropped_pairs,
        "dropped_by_kind": data.dropped_by_kind,
        "mode": args.mode,
    }
    text = (
        f"{len(data)} instances valid ({args.mode} mode)"
        + (f", {data.dropped_pairs} pairs dropped" if data.dropped_pairs else "")
    )
    _emit(args, payload, text)
    return 0


def cmd_dataset_stats(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode=args.mode)
    stats = ds_mod.compute_stats(data)
    _emit(args, stats.to_json(), stats.render())
    return 0


def cmd_dataset_gen_synthetic(args) -> int:
    forest = _load_forest(args)
    ratios = tuple(float(x) for x in args.ratios.split(","))
    data = ds_mod.generate_synthetic(
        forest,
        args.n,
        ratios,
        noise_rate=args.noise_rate,
        vnp_signal_share=args.vnp_share,
        seed=args.seed,
    )
    ds_mod.write_dataset(data, args.out)
    stats = ds_mod.compute_stats(data)
    _emit(args, {"out": args.out, "stats": stats.to_json()},
          f"wrote {len(data)} instances to {args.out}\n" + stats.render())
    return 0


def cmd_dataset_split(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    folds = ds_mod.stratified_kfold(data, args.k, args.seed)
    payload = {"folds": [{"train": tr, "test": te} for tr, te in folds]}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")
    text = "\n".join(
        f"fold {i}: train={len(tr)} test={len(te)}" for i, (tr, te) in enumerate(folds)
    )
    _emit(args, payload, text)
    return 0


# --- features -------------------------------------------------------------------

def cmd_features_build(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    space = feat_mod.build_vocabulary(
        data, min_freq=args.min_freq, mode=args.mode, forest=forest,
        representation=args.representation,
    )
    feat_mod.save_space(space, args.out)
    _emit(args, {"out": args.out, "dimension": space.dimension,
                 "vocabulary_size": len(space.vocabulary)},
          f"vocabulary of {len(space.vocabulary)} pairs written to {args.out}")
    return 0


def cmd_features_select(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    space = feat_mod.load_space(_resolve(args.space))
    indices = data.labeled_indices()
    X = feat_mod.featurize_dataset(data, space, indices)
    y = feat_mod.label_vector(data, indices)
    result = feat_mod.cfs_select(X, y)
    selected_space = space.with_selection(result.selected)
    feat_mod.save_space(selected_space, args.out)
    keys = [space.vocabulary[i] for i in result.selected]
    _emit(args, {"out": args.out, "selected": result.selected, "keys": keys,
                 "merit": result.merit},
          f"selected {len(result.selected)}/{len(space.vocabulary)} features"
          f" (merit {result.merit:.4f}) -> {args.out}")
    return 0


# --- model ----------------------------------------------------------------------

def cmd_model_train(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    space = feat_mod.load_space(_resolve(args.space))
    indices = data.labeled_indices()
    X = feat_mod.featurize_dataset(data, space, indices)
    y = [data[i].label.value for i in indices]
    params = TrainParams(algorithm=args.algorithm, seed=args.seed)
    model = train(X, y, params)
    save_model(model, args.out)
    _emit(args, {"out": args.out, "algorithm": model.algorithm,
                 "dimension": model.dimension, "labels": list(model.labels)},
          f"trained {model.algorithm} on {len(indices)} instances -> {args.out}")
    return 0


def cmd_model_predict(args) -> int:
    forest = _load_forest(args)
    model = load_model(_resolve(args.model))
    space = feat_mod.load_space(_resolve(args.space))
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    X = feat_mod.featurize_dataset(data, space)
    predictions = predict_matrix(model, X)
    payload = {"predictions": [
        {"gif_id": inst.gif_id, "label": label}
        for inst, label in zip(data, predictions)
    ]}
    text = "\n".join(f"{inst.gif_id}\t{label}" for inst, label in zip(data, predictions))
    _emit(args, payload, text)
    return 0


# --- eval -----------------------------------------------------------------------

def cmd_eval_run(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    params = TrainParams(algorithm=args.algorithm, seed=args.seed)
    fc = FeatureConfig(mode=args.mode, min_freq=args.min_freq,
                       representation=args.representation, cfs=args.cfs)
    report = cross_validate(data, forest, params, k=args.k, seed=args.seed, feature_config=fc)
    _emit(args, report.to_json(), report.render())
    return 0


def cmd_eval_suite(args) -> int:
    forest = _load_forest(args)
    data = ds_mod.load_dataset(_resolve(args.infile), forest, mode="strict")
    config = SuiteConfig(k=args.k, seed=args.seed, mode=args.mode, min_freq=args.min_freq)
    report = run_suite(data, forest, config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json_text())
            fh.write("\n")
    if args.json:
        print(report.to_json_text())
    else:
        print(report.render(paper_format=args.paper_format))
    return 0


# --- serve ----------------------------------------------------------------------

def cmd_serve(args) -> int:
    from .service import AnnotationStore, load_tasks, make_server

    forest = _load_forest(args)
    tasks = load_tasks(_resolve(args.tasks))
    workers = [w for w in args.workers.split(",") if w]
    store = AnnotationStore(
        forest=forest,
        tasks=tasks,
        workers=workers,
        state_dir=args.state_dir,
        required_workers=args.required_workers,
        lease_seconds=args.lease_seconds,
    )
    server = make_server(store, host=args.host, port=args.port, ui_dir=args.ui_dir)
    port = server.server_address[1]
    if args.json:
        print(json.dumps({"host": args.host, "port": port}), flush=True)
    else:
        print(f"annotation service on http://{args.host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        store.close()
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gso", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    # forest
    forest = sub.add_parser("forest", help="build and query the synset forest")
    forest_sub = forest.add_subparsers(dest="subcommand", required=True)
    p = forest_sub.add_parser("build")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out")
    p.add_argument("--no-propagate", action="store_true",
                   help="keep missing scores instead of inheriting from ancestors")
    add_json(p)
    p.set_defaults(func=cmd_forest_build)
    p = forest_sub.add_parser("stats")
    p.add_argument("--forest", required=True)
    add_json(p)
    p.set_defaults(func=cmd_forest_stats)
    p = forest_sub.add_parser("search")
    p.add_argument("--forest", required=True)
    p.add_argument("--query", default="")
    p.add_argument("--pos", choices=("adjective", "verb", "noun"))
    add_json(p)
    p.set_defaults(func=cmd_forest_search)

    # pairs
    pairs = sub.add_parser("pairs", help="pair vocabulary")
    pairs_sub = pairs.add_subparsers(dest="subcommand", required=True)
    p = pairs_sub.add_parser("enumerate")
    p.add_argument("--forest", required=True)
    p.add_argument("--max", type=int)
    p.add_argument("--out")
    add_json(p)
    p.set_defaults(func=cmd_pairs_enumerate)

    # dataset
    dataset = sub.add_parser("dataset", help="GSO-2015 dataset operations")
    dataset_sub = dataset.add_subparsers(dest="subcommand", required=True)
    p = dataset_sub.add_parser("validate")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    add_json(p)
    p.set_defaults(func=cmd_dataset_validate)
    p = dataset_sub.add_parser("stats")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--mode", choices=("strict", "lenient"), default="strict")
    add_json(p)
    p.set_defaults(func=cmd_dataset_stats)
    p = dataset_sub.add_parser("gen-synthetic")
    p.add_argument("--forest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ratios", default="0.603,0.078,0.321",
                   help="positive,negative,neutral shares")
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.add_argument("--vnp-share", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    add_json(p)
    p.set_defaults(func=cmd_dataset_gen_synthetic)
    p = dataset_sub.add_parser("split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    add_json(p)
    p.set_defaults(func=cmd_dataset_split)

    # features
    features = sub.add_parser("features", help="BoW vocabulary and selection")
    features_sub = features.add_subparsers(dest="subcommand", required=True)
    p = features_sub.add_parser("build")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("binary", "count", "weighted"), default="binary")
    p.add_argument("--min-freq", type=int, default=1)
    p.add_argument("--representation", choices=("sentipair", "anp", "vnp"),
                   default="sentipair")
    add_json(p)
    p.set_defaults(func=cmd_features_build)
    p = features_sub.add_parser("select")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--out", required=True)
    add_json(p)
    p.set_defaults(func=cmd_features_select)

    # model
    model = sub.add_parser("model", help="train and apply classifiers")
    model_sub = model.add_subparsers(dest="subcommand", required=True)
    p = model_sub.add_parser("train")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--algorithm", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    add_json(p)
    p.set_defaults(func=cmd_model_train)
    p = model_sub.add_parser("predict")
    p.add_argument("--model", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    add_json(p)
    p.set_defaults(func=cmd_model_predict)

    # eval
    evaluate = sub.add_parser("eval", help="cross-validation and the table suite")
    eval_sub = evaluate.add_subparsers(dest="subcommand", required=True)
    p = eval_sub.add_parser("run")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--algorithm", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("binary", "count", "weighted"), default="binary")
    p.add_argument("--min-freq", type=int, default=1)
    p.add_argument("--cfs", action="store_true")
    p.add_argument("--representation", choices=("sentipair", "anp", "vnp"),
                   default="sentipair")
    add_json(p)
    p.set_defaults(func=cmd_eval_run)
    p = eval_sub.add_parser("suite")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--forest", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("binary", "count", "weighted"), default="binary")
    p.add_argument("--min-freq", type=int, default=1)
    p.add_argument("--paper-format", action="store_true")
    p.add_argument("--out")
    add_json(p)
    p.set_defaults(func=cmd_eval_suite)

    # serve
    p = sub.add_parser("serve", help="annotation service over HTTP")
    p.add_argument("--forest", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--workers", required=True, help="comma-separated worker ids")
    p.add_argument("--state-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--required-workers", type=int, default=7)
    p.add_argument("--lease-seconds", type=float, default=600.0)
    p.add_argument("--ui-dir", help="serve this directory at / (the browser UI)")
    add_json(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except GsoError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
