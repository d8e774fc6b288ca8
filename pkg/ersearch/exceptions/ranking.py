"""
Evaluation, training and test-collection errors.
"""
from ersearch.exceptions.general import (
    BaseError, ConfigError, CorpusError, IndexStoreError, QueryError
)


class EvaluationError(BaseError):
    """Base class for run and qrels errors."""
    code = 7
    message = "Evaluation error."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


class RunFormatError(EvaluationError):
    """A run file line is not in TREC run format."""
    message = "Malformed run line."


class QrelsFormatError(EvaluationError):
    """A qrels line is not in TREC qrels format."""
    message = "Malformed qrels line."


class MissingQrelsError(EvaluationError):
    """A run query has no relevance judgments."""
    message = "Run query missing from qrels."


class TrainingError(BaseError):
    """Base class for learning-to-rank errors."""
    code = 8
    message = "Training error."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


class NoRelevantCandidatesError(TrainingError):
    """No training query has a relevant tuple among its candidates."""
    message = (
        "No relevant tuple is reachable by candidate generation; "
        "increase k or the rerank depth."
    )


class FoldError(TrainingError):
    """More folds requested than there are queries."""
    message = "Fold count exceeds the number of queries."


class CollectionError(BaseError):
    """Base class for test-collection builder errors."""
    code = 9
    message = "Collection builder error."

    def __init__(self, data=None):
        super().__init__(self.code, self.message, data)


class TableFormatError(CollectionError):
    """A source table is not rectangular or misses required fields."""
    message = "Invalid source table."


errors_map = {
    ConfigError.code: ConfigError,
    CorpusError.code: CorpusError,
    IndexStoreError.code: IndexStoreError,
    QueryError.code: QueryError,
    EvaluationError.code: EvaluationError,
    TrainingError.code: TrainingError,
    CollectionError.code: CollectionError,
}
