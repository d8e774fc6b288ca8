"""
Command-line entry point: ersearch <command> [options].
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

from ersearch.classes import collection, evaluation, query as queries
from ersearch.classes.engine import ERSearch
from ersearch.classes.ranking import write_weights
from ersearch.classes.settings import Settings
from ersearch.const import JACCARD_THRESHOLD, Metric, ModelName, ScorerFamily
from ersearch.exceptions import BaseError, ConfigError, errors_map

logger = logging.getLogger("ersearch")

SETTING_FLAGS = (
    "index_dir", "scorer", "model", "k", "top_n", "rerank_depth",
    "mu_entity", "mu_relationship", "mu_document", "alpha", "k1", "b",
    "window", "extraction_cap", "weights_file", "seed", "restarts",
    "max_sweeps", "epsilon", "folds", "metric", "probes", "workers",
    "run_tag",
)


def settings_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("settings (override config file)")
    group.add_argument("--config", help="KEY=value settings file")
    group.add_argument("--index-dir", dest="index_dir")
    group.add_argument("--scorer", choices=[f.value for f in ScorerFamily])
    group.add_argument("--model", choices=[m.value for m in ModelName])
    group.add_argument("-k", dest="k", type=int,
                       help="first-pass candidates per sub-query")
    group.add_argument("--top-n", dest="top_n", type=int)
    group.add_argument("--rerank-depth", dest="rerank_depth", type=int)
    group.add_argument("--mu-entity", dest="mu_entity", type=float)
    group.add_argument("--mu-relationship", dest="mu_relationship",
                       type=float)
    group.add_argument("--mu-document", dest="mu_document", type=float)
    group.add_argument("--alpha", type=float)
    group.add_argument("--k1", type=float)
    group.add_argument("--b", type=float)
    group.add_argument("--window", type=int)
    group.add_argument("--extraction-cap", dest="extraction_cap", type=int)
    group.add_argument("--weights", dest="weights_file")
    group.add_argument("--seed", type=int)
    group.add_argument("--restarts", type=int)
    group.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    group.add_argument("--epsilon", type=float)
    group.add_argument("--folds", type=int)
    group.add_argument("--metric",
                       choices=[Metric.MAP.value, Metric.NDCG20.value])
    group.add_argument("--probes", type=int)
    group.add_argument("--workers", type=int)
    group.add_argument("--run-tag", dest="run_tag")
    group.add_argument("-v", "--verbose", action="store_true")
    group.add_argument("-q", "--quiet", action="store_true",
                       help="no progress bars")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = settings_parser()
    parser = argparse.ArgumentParser(
        prog="ersearch",
        description="Entity-relationship retrieval engine.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser(
        "ingest", parents=[common], help="validate a corpus")
    ingest.add_argument("corpus")
    ingest.add_argument("--dump", help="write extractions as JSON Lines")
    ingest.set_defaults(handler=run_ingest)

    build = commands.add_parser(
        "build-index", parents=[common], help="index a corpus")
    build.add_argument("corpus")
    build.set_defaults(handler=run_build_index)

    stats = commands.add_parser(
        "stats", parents=[common], help="print collection statistics")
    stats.set_defaults(handler=run_stats)

    search = commands.add_parser(
        "search", parents=[common], help="print ranked tuples")
    search.add_argument("queries", help="query file")
    search.add_argument("--query-id", dest="query_id")
    search.set_defaults(handler=run_search)

    batch = commands.add_parser(
        "batch-search", parents=[common], help="write a TREC run")
    batch.add_argument("queries", help="query file")
    batch.add_argument("-o", "--output", required=True)
    batch.set_defaults(handler=run_batch_search)

    train = commands.add_parser(
        "train", parents=[common], help="learn ERDM weights")
    train.add_argument("queries", help="query file")
    train.add_argument("qrels")
    train.add_argument("-o", "--output", required=True)
    train.set_defaults(handler=run_train)

    evaluate = commands.add_parser(
        "evaluate", parents=[common], help="score a run against qrels")
    evaluate.add_argument("run")
    evaluate.add_argument("qrels")
    evaluate.add_argument("--complete", action="store_true",
                          help="count judged queries missing from the run")
    evaluate.set_defaults(handler=run_evaluate)

    builder = commands.add_parser(
        "build-collection", parents=[common],
        help="derive query skeletons and qrels from tables")
    builder.add_argument("tables")
    builder.add_argument("--skeletons", required=True)
    builder.add_argument("--qrels-out", dest="qrels_out", required=True)
    builder.add_argument("--threshold", type=float, default=JACCARD_THRESHOLD)
    builder.add_argument("--arity", type=int, choices=(2, 3), default=2)
    builder.set_defaults(handler=run_build_collection)

    return parser


def run_ingest(engine: ERSearch, args) -> Dict:
    corpus = engine.ingest(args.corpus, args.dump)
    return {"documents": len(corpus)}


def run_build_index(engine: ERSearch, args) -> Dict:
    if not engine.settings.index_dir:
        raise ConfigError(data="build-index needs --index-dir")
    corpus = engine.ingest(args.corpus)
    index = engine.build_index(corpus, engine.settings.index_dir)
    return {name: stats["doc_count"]
            for name, stats in index.describe().items()}


def run_stats(engine: ERSearch, args) -> Dict:
    return engine.index.describe()


def run_search(engine: ERSearch, args) -> None:
    for query in queries.parse_queries(args.queries):
        if args.query_id and query.query_id != args.query_id:
            continue
        for rank, candidate in enumerate(engine.search(query), 1):
            print(f"{query.query_id}\t{rank}\t{candidate.key}\t"
                  f"{candidate.joint_score:.6f}")


def run_batch_search(engine: ERSearch, args) -> Dict:
    run = engine.batch_search(queries.parse_queries(args.queries))
    evaluation.write_run(run, args.output)
    return {"queries": len(run.rankings), "output": args.output}


def run_train(engine: ERSearch, args) -> Dict:
    validation = engine.train(
        queries.parse_queries(args.queries), evaluation.load_qrels(args.qrels)
    )
    write_weights(validation, engine.settings.train_config(), args.output)
    return {"lambda": validation.weights.as_lambda(),
            "macro": validation.macro}


def run_evaluate(engine: ERSearch, args) -> None:
    report = engine.evaluate(
        evaluation.load_run(args.run), evaluation.load_qrels(args.qrels),
        complete=args.complete,
    )
    print(evaluation.format_report(report))


def run_build_collection(engine: ERSearch, args) -> Dict:
    skeletons, qrels = engine.build_collection(
        collection.load_tables(args.tables), args.threshold,
        arity=args.arity, seed=args.seed,
    )
    collection.write_skeletons(skeletons, args.skeletons)
    evaluation.write_qrels(qrels, args.qrels_out)
    return {"skeletons": len(skeletons)}


def configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not verbose:
        # errors are reported once, by main
        logging.getLogger("ersearch.exceptions").setLevel(logging.CRITICAL)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        settings = Settings.load(
            args.config,
            {name: getattr(args, name, None) for name in SETTING_FLAGS},
        )
        engine = ERSearch(
            settings, progress=sys.stderr.isatty() and not args.quiet
        )
        output = args.handler(engine, args)
    except BaseError as error:
        family = errors_map.get(error.code, BaseError).__name__
        print(f"ersearch: {family}: {error}", file=sys.stderr)
        return error.code

    if output is not None:
        print(json.dumps(output, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
