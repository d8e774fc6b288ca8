import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import ir_measures
import numpy as np
from ir_measures import AP, RR, P, nDCG

from ersearch.const import (
    DEFAULT_RUN_TAG, MAP_DEPTH, NDCG_DEPTH, PRECISION_DEPTH, Metric
)
from ersearch.exceptions import ranking as exc
from ersearch.types import CandidateTuple, MetricReport, Qrels, RunResult
from ersearch.util import canonicalize_key

logger = logging.getLogger(__name__)

METRICS = (Metric.MAP, Metric.P10, Metric.MRR, Metric.NDCG20)

# rankings reach the evaluator already cut at MAP_DEPTH
MEASURES = {
    Metric.MAP: AP,
    Metric.P10: P @ PRECISION_DEPTH,
    Metric.MRR: RR,
    Metric.NDCG20: nDCG @ NDCG_DEPTH,
}
QUERY = "q"


def load_qrels(path: Union[str, Path]) -> Qrels:
    """
    Read "query_id 0 tuple_key rel" lines; keys are canonicalized.
    """
    path = Path(path)
    if not path.is_file():
        raise exc.QrelsFormatError(data=f"{path}: file not found")

    judgments: Dict[str, Dict[str, int]] = {}
    with path.open(encoding="utf-8") as stream:
        for line_number, line in enumerate(stream, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 4:
                raise exc.QrelsFormatError(
                    data=f"{path}:{line_number}: expected 4 fields, "
                    f"got {len(fields)}"
                )
            query_id, _, key, grade = fields
            try:
                grade = int(grade)
            except ValueError:
                raise exc.QrelsFormatError(
                    data=f"{path}:{line_number}: relevance {grade!r}"
                )
            judgments.setdefault(query_id, {})[canonicalize_key(key)] = grade

    return Qrels(judgments=judgments)


def write_qrels(qrels: Qrels, path: Union[str, Path]):
    with Path(path).open("w", encoding="utf-8") as stream:
        for query_id in qrels.query_ids():
            for key, grade in sorted(qrels.grades(query_id).items()):
                stream.write(f"{query_id} 0 {key} {grade}\n")


def load_run(path: Union[str, Path]) -> RunResult:
    """
    Read "query_id Q0 tuple_key rank score tag" lines, ordered by rank.
    """
    path = Path(path)
    if not path.is_file():
        raise exc.RunFormatError(data=f"{path}: file not found")

    rows: Dict[str, List[Tuple[int, str, float]]] = {}
    tag = DEFAULT_RUN_TAG
    with path.open(encoding="utf-8") as stream:
        for line_number, line in enumerate(stream, start=1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 6:
                raise exc.RunFormatError(
                    data=f"{path}:{line_number}: expected 6 fields, "
                    f"got {len(fields)}"
                )
            query_id, _, key, rank, score, tag = fields
            try:
                rows.setdefault(query_id, []).append(
                    (int(rank), canonicalize_key(key), float(score))
                )
            except ValueError:
                raise exc.RunFormatError(
                    data=f"{path}:{line_number}: bad rank or score"
                )

    rankings = {
        query_id: [(key, score) for _, key, score in sorted(items)]
        for query_id, items in rows.items()
    }
    return RunResult(rankings=rankings, tag=tag)


def write_run(run: RunResult, path: Union[str, Path]):
    """
    Write a run in TREC format; scores keep their shortest round-trip
    representation.
    """
    with Path(path).open("w", encoding="utf-8") as stream:
        for query_id in run.query_ids():
            for rank, (key, score) in enumerate(run.ranking(query_id), 1):
                stream.write(
                    f"{query_id} Q0 {key} {rank} {float(score)!r} {run.tag}\n"
                )


def run_from_results(results: Mapping[str, Sequence[CandidateTuple]],
                     tag: str = DEFAULT_RUN_TAG) -> RunResult:
    """
    Run with tuple keys in sub-query order.
    """
    return RunResult(
        rankings={
            query_id: [(c.ordered_key, c.joint_score) for c in candidates]
            for query_id, candidates in results.items()
        },
        tag=tag,
    )


def ordered_keys(ranking: Iterable[Tuple[str, float]]) -> List[str]:
    """
    Canonical keys by score descending, ties by key ascending; a tuple
    listed twice keeps its best position.
    """
    ranked = sorted(
        ((canonicalize_key(key), score) for key, score in ranking),
        key=lambda item: (-item[1], item[0]),
    )
    return list(dict.fromkeys(key for key, _ in ranked))


def query_metrics(ranking: Iterable[Tuple[str, float]],
                  grades: Mapping[str, int]) -> Dict[str, float]:
    """
    MAP@100, P@10, MRR@100 and NDCG@20 of one ranked list.

    The list is cut at depth 100 and re-scored by rank, so the evaluator
    sees exactly this order. Without results or without a relevant tuple
    every metric is 0.
    """
    keys = ordered_keys(ranking)[:MAP_DEPTH]
    values = {metric.value: 0.0 for metric in METRICS}
    if not keys or not any(grade > 0 for grade in grades.values()):
        return values

    qrels = {QUERY: {key: int(grade) for key, grade in grades.items()}}
    run = {QUERY: {
        key: float(len(keys) - rank) for rank, key in enumerate(keys)
    }}
    for result in ir_measures.iter_calc(list(MEASURES.values()), qrels, run):
        for metric, measure in MEASURES.items():
            if result.measure == measure:
                values[metric.value] = float(result.value)
    return values


def macro_average(values: Sequence[Mapping[str, float]]) -> Dict[str, float]:
    """
    Mean of every metric over the given per-query (or per-fold) values.
    """
    return {
        metric.value: float(np.mean([v[metric.value] for v in values]))
        if values else 0.0
        for metric in METRICS
    }


def metrics(run: RunResult, qrels: Qrels,
            query_ids: Optional[Iterable[str]] = None) -> MetricReport:
    """
    Per-query metrics and their macro average.

    Parameters
    ----------
    run : RunResult
        Ranked tuples per query.
    qrels : Qrels
        Judgments; every run query needs an entry.
    query_ids : iterable of str, optional
        Queries to average over, defaulting to the run queries. Queries
        without results score 0.

    Returns
    -------
    MetricReport
    """
    for query_id in run.query_ids():
        if query_id not in qrels:
            raise exc.MissingQrelsError(data=query_id)

    query_ids = sorted(query_ids) if query_ids is not None \
        else run.query_ids()

    per_query = {
        query_id: query_metrics(run.ranking(query_id),
                                qrels.grades(query_id))
        for query_id in query_ids
    }
    report = MetricReport(
        per_query=per_query, macro=macro_average(list(per_query.values()))
    )
    logger.info(f"Evaluated {len(per_query)} queries: {report.macro}")
    return report


def format_report(report: MetricReport) -> str:
    """
    Per-query TSV followed by the macro averages as one JSON line.
    """
    names = [metric.value for metric in METRICS]
    lines = ["\t".join(["query_id"] + names)]
    for query_id, values in sorted(report.per_query.items()):
        lines.append("\t".join(
            [query_id] + [f"{values[name]:.4f}" for name in names]
        ))
    lines.append(json.dumps(report.macro, sort_keys=True))
    return "\n".join(lines)
