import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

from ersearch.classes.evaluation import macro_average, query_metrics
from ersearch.const import (
    DEFAULT_TOP_N, FEATURE_NAMES, MAP_DEPTH, NDCG_DEPTH, Metric
)
from ersearch.exceptions import general as general_exc
from ersearch.exceptions import ranking as exc
from ersearch.types import (
    CandidateTuple, CrossValidation, FeatureWeights, FoldPlan, FoldResult,
    Qrels, TrainConfig, TrainResult
)

logger = logging.getLogger(__name__)

DIMENSIONS = len(FEATURE_NAMES)


def make_folds(query_ids: Iterable[str], fold_count: int,
               seed: int) -> FoldPlan:
    """
    Randomly split queries into fixed test folds of near-equal size.

    The plan only depends on the set of ids and the seed.
    """
    ids = sorted(set(query_ids))
    if fold_count < 1 or fold_count > len(ids):
        raise exc.FoldError(data=f"{fold_count} folds for {len(ids)} queries")

    order = np.random.RandomState(seed).permutation(len(ids))
    folds = tuple(
        tuple(sorted(ids[i] for i in chunk))
        for chunk in np.array_split(order, fold_count)
    )
    return FoldPlan(folds=folds, seed=seed)


@dataclass
class TrainingQuery:
    """
    Feature rows and judgments of the candidates of one query.

    A tuple may contribute one row per orientation and is ranked by its
    best-scoring row.
    """
    query_id: str
    keys: List[str]
    features: np.ndarray
    grades: Dict[str, int]

    def __post_init__(self):
        self.tuple_keys = sorted(set(self.keys))
        positions = {key: rank for rank, key in enumerate(self.tuple_keys)}
        self.rows = np.array([positions[key] for key in self.keys], dtype=int)
        self.labels = np.array(
            [self.grades.get(key, 0) for key in self.tuple_keys], dtype=float
        )
        self.relevant_total = sum(1 for g in self.grades.values() if g > 0)
        ideal = sorted((g for g in self.grades.values() if g > 0),
                       reverse=True)[:NDCG_DEPTH]
        self.ideal_dcg = float(sum(
            gain / np.log2(rank + 2) for rank, gain in enumerate(ideal)
        ))

    @classmethod
    def from_candidates(cls, query_id: str,
                        candidates: Sequence[CandidateTuple],
                        grades: Mapping[str, int]) -> "TrainingQuery":
        features = np.array(
            [candidate.features.as_array() for candidate in candidates],
            dtype=float,
        ).reshape(len(candidates), DIMENSIONS)
        return cls(
            query_id=query_id,
            keys=[candidate.key for candidate in candidates],
            features=features,
            grades=dict(grades),
        )

    @property
    def reachable(self) -> bool:
        return bool((self.labels > 0).any())

    def tuple_scores(self, weights: np.ndarray) -> np.ndarray:
        best = np.full(len(self.tuple_keys), -np.inf)
        np.maximum.at(best, self.rows, self.features @ weights)
        return best

    def order(self, weights: np.ndarray) -> np.ndarray:
        """
        Tuple indices by score descending, ties by key ascending.
        """
        # tuple_keys is sorted, so a stable sort breaks ties by key
        return np.argsort(-self.tuple_scores(weights), kind="stable")

    def ranking(self, weights: np.ndarray, limit: int = DEFAULT_TOP_N):
        scores = self.tuple_scores(weights)
        return [
            (self.tuple_keys[i], float(scores[i]))
            for i in self.order(weights)[:limit]
        ]

    def average_precision(self, weights: np.ndarray) -> float:
        if self.relevant_total == 0 or not self.tuple_keys:
            return 0.0
        hits = self.labels[self.order(weights)[:MAP_DEPTH]] > 0
        if not hits.any():
            return 0.0
        precision = np.cumsum(hits) / np.arange(1, len(hits) + 1)
        return float(precision[hits].sum() / self.relevant_total)

    def ndcg(self, weights: np.ndarray) -> float:
        if self.ideal_dcg == 0 or not self.tuple_keys:
            return 0.0
        gains = np.clip(self.labels[self.order(weights)[:NDCG_DEPTH]], 0, None)
        discounts = 1.0 / np.log2(np.arange(2, len(gains) + 2))
        return float((gains * discounts).sum() / self.ideal_dcg)

    def score(self, weights: np.ndarray, metric: Metric) -> float:
        if metric == Metric.NDCG20:
            return self.ndcg(weights)
        return self.average_precision(weights)


def objective(weights: np.ndarray, queries: Sequence[TrainingQuery],
              metric: Metric) -> float:
    """
    Mean training metric over queries.
    """
    if not queries:
        return 0.0
    return float(np.mean([query.score(weights, metric) for query in queries]))


def with_coordinate(weights: np.ndarray, coordinate: int,
                    value: float) -> np.ndarray:
    """
    Set one weight and rescale the others so the vector sums to 1.
    """
    updated = weights.copy()
    rest = weights.sum() - weights[coordinate]
    if rest > 0:
        updated *= (1.0 - value) / rest
    else:
        updated[:] = (1.0 - value) / (len(weights) - 1)
    updated[coordinate] = value
    return updated


class CoordinateAscent:
    """
    Derivative-free optimisation of the rank metric over the weight
    simplex.
    """

    def __init__(self, config: Optional[TrainConfig] = None,
                 progress: bool = False):
        self.config = config or TrainConfig()
        self.metric = Metric(self.config.metric)
        self.progress = progress
        self.grid = np.linspace(0.0, 1.0, self.config.probes + 1)

    def line_search(self, weights: np.ndarray, coordinate: int,
                    queries: Sequence[TrainingQuery]):
        """
        Best grid value of one coordinate; the first maximum wins.
        """
        best_weights, best_value = None, -np.inf
        for value in self.grid:
            candidate = with_coordinate(weights, coordinate, value)
            score = objective(candidate, queries, self.metric)
            if score > best_value:
                best_weights, best_value = candidate, score
        return best_weights, best_value

    def ascend(self, start: np.ndarray, queries: Sequence[TrainingQuery],
               restart: int) -> TrainResult:
        weights = start / start.sum()
        best = objective(weights, queries, self.metric)
        trace = [best]

        for sweep in range(self.config.max_sweeps):
            sweep_start = best
            for coordinate in range(DIMENSIONS):
                candidate, value = self.line_search(
                    weights, coordinate, queries
                )
                if value > best:
                    weights, best = candidate, value
                    trace.append(best)

            logger.debug(
                f"restart {restart} sweep {sweep}: {self.metric.value}={best}"
            )
            if best - sweep_start < self.config.epsilon:
                break

        return TrainResult(
            weights=FeatureWeights.from_array(weights),
            objective=best,
            restart=restart,
            trace=tuple(trace),
        )

    def fit(self, queries: Sequence[TrainingQuery]) -> TrainResult:
        """
        Run every restart and return the best one.

        Restart 0 starts from equal entity and relationship unigram
        weights; later restarts start from seeded random simplex points.
        Ties go to the lowest restart index.
        """
        if not any(query.reachable for query in queries):
            raise exc.NoRelevantCandidatesError(
                data=f"{len(queries)} training queries"
            )

        rng = np.random.RandomState(self.config.seed)
        starts = [FeatureWeights.unigram().as_array()] + [
            rng.dirichlet(np.ones(DIMENSIONS))
            for _ in range(self.config.restarts - 1)
        ]

        best = None
        for restart, start in enumerate(tqdm(
                starts, desc="restarts", disable=not self.progress)):
            result = self.ascend(start, queries, restart)
            if best is None or result.objective > best.objective:
                best = result

        logger.info(
            f"Trained on {len(queries)} queries: "
            f"{self.metric.value}={best.objective:.4f} "
            f"(restart {best.restart})"
        )
        return best


def training_queries(results: Mapping[str, Sequence[CandidateTuple]],
                     qrels: Qrels) -> Dict[str, TrainingQuery]:
    """
    Pair featured candidates with judgments; queries without judgments
    are left out.
    """
    queries = {}
    for query_id, candidates in sorted(results.items()):
        if query_id not in qrels:
            logger.warning(f"No judgments for {query_id}, not used")
            continue
        queries[query_id] = TrainingQuery.from_candidates(
            query_id, candidates, qrels.grades(query_id)
        )
    return queries


def cross_validate(queries: Mapping[str, TrainingQuery], plan: FoldPlan,
                   config: Optional[TrainConfig] = None,
                   top_n: int = DEFAULT_TOP_N,
                   progress: bool = False) -> CrossValidation:
    """
    Train on every fold's training queries, evaluate on its test queries,
    and train the final weights on all queries.
    """
    trainer = CoordinateAscent(config, progress=progress)
    folds: List[FoldResult] = []

    for fold in range(len(plan)):
        train_ids = [q for q in plan.train(fold) if q in queries]
        test_ids = [q for q in plan.test(fold) if q in queries]
        result = trainer.fit([queries[q] for q in train_ids])
        weights = result.weights.as_array()

        per_query = [
            query_metrics(queries[q].ranking(weights, top_n), queries[q].grades)
            for q in test_ids
        ]
        folds.append(FoldResult(
            fold=fold,
            train=tuple(train_ids),
            test=tuple(test_ids),
            weights=result.weights,
            objective=result.objective,
            test_metrics=macro_average(per_query),
        ))

    final = trainer.fit([queries[q] for q in sorted(queries)])
    macro = macro_average([fold.test_metrics for fold in folds])
    logger.info(f"Cross-validated over {len(folds)} folds: {macro}")
    return CrossValidation(folds=tuple(folds), weights=final.weights,
                           macro=macro)


def write_weights(validation: CrossValidation, config: TrainConfig,
                  path: Union[str, Path]):
    Path(path).write_text(
        json.dumps(
            validation.to_weights_file(config.metric, config.seed),
            indent=2, sort_keys=True,
        ),
        encoding="utf-8",
    )


def load_weights(path: Union[str, Path]) -> FeatureWeights:
    """
    Read the "lambda" object of a weights file, normalized onto the
    simplex.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        values = data["lambda"]
        unknown = set(values) - set(FEATURE_NAMES)
        if unknown:
            raise ValueError(f"unknown weights {sorted(unknown)}")
        return FeatureWeights(
            **{name: float(values.get(name, 0.0)) for name in FEATURE_NAMES}
        ).normalized()
    except (OSError, KeyError, TypeError, ValueError) as error:
        raise general_exc.ConfigError(data=f"{path}: {error}")
