from dataclasses import dataclass, field
from typing import Dict, Tuple

from ersearch.const import (
    DEFAULT_EPSILON, DEFAULT_FOLDS, DEFAULT_MAX_SWEEPS, DEFAULT_PROBES,
    DEFAULT_RESTARTS, DEFAULT_SEED, Metric
)
from ersearch.types.common import Common
from ersearch.types.scoring import FeatureWeights


@dataclass(frozen=True)
class TrainConfig(Common):
    """
    Coordinate ascent parameters.
    """
    metric: Metric = Metric.MAP
    restarts: int = DEFAULT_RESTARTS
    max_sweeps: int = DEFAULT_MAX_SWEEPS
    epsilon: float = DEFAULT_EPSILON
    fold_count: int = DEFAULT_FOLDS
    seed: int = DEFAULT_SEED
    probes: int = DEFAULT_PROBES

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.probes < 2:
            raise ValueError("probes must be at least 2")
        if self.metric not in (Metric.MAP, Metric.NDCG20):
            raise ValueError("training metric must be map or ndcg@20")


@dataclass(frozen=True)
class FoldPlan(Common):
    """
    Fixed test folds; the training set of a fold is every other query.
    """
    folds: Tuple[Tuple[str, ...], ...]
    seed: int = DEFAULT_SEED

    def __len__(self) -> int:
        return len(self.folds)

    def test(self, fold: int) -> Tuple[str, ...]:
        return self.folds[fold]

    def train(self, fold: int) -> Tuple[str, ...]:
        return tuple(
            query_id
            for index, ids in enumerate(self.folds) if index != fold
            for query_id in ids
        )


@dataclass(frozen=True)
class TrainResult(Common):
    """
    Outcome of one coordinate ascent run.

    trace lists the objective after every accepted step of the winning
    restart, starting with its initial point.
    """
    weights: FeatureWeights
    objective: float
    restart: int
    trace: Tuple[float, ...] = ()


@dataclass(frozen=True)
class FoldResult(Common):
    fold: int
    train: Tuple[str, ...]
    test: Tuple[str, ...]
    weights: FeatureWeights
    objective: float
    test_metrics: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CrossValidation(Common):
    """
    Per-fold weights plus held-out metrics averaged over folds.
    """
    folds: Tuple[FoldResult, ...]
    weights: FeatureWeights
    macro: Dict[str, float] = field(default_factory=dict)

    def to_weights_file(self, metric: Metric, seed: int) -> Dict:
        return {
            "lambda": self.weights.as_lambda(),
            "metric": Metric(metric).value,
            "seed": seed,
            "macro": self.macro,
            "folds": [fold.as_dict() for fold in self.folds],
        }


