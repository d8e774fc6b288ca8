import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from ersearch.classes import collection, evaluation, ranking
from ersearch.classes.corpus import load_corpus
from ersearch.classes.extraction import Extractor, write_extractions
from ersearch.classes.index import ERIndex, IndexBuilder
from ersearch.classes.late_fusion import LateFusion
from ersearch.classes.retrieval import Retriever
from ersearch.classes.settings import Settings
from ersearch.const import ModelName
from ersearch.exceptions import general as exc
from ersearch.types import (
    CandidateTuple, Corpus, CrossValidation, ERQuery, FeatureWeights,
    MetricReport, Qrels, QuerySkeleton, RunResult, SourceTable
)

logger = logging.getLogger(__name__)


class ERSearch:
    """
    The ERSearch class wires corpus ingestion, indexing, retrieval,
    training and evaluation behind one interface.
    """

    def __init__(self, settings: Optional[Settings] = None,
                 index: Optional[ERIndex] = None, progress: bool = False):
        """
        Initialize the engine.

        :param settings: Engine settings (defaults when omitted).
        :param index: An index already in memory; otherwise it is loaded
            from settings.index_dir on first use.
        :param progress: Show progress bars for long loops.
        """
        self.settings = settings or Settings()
        self.progress = progress
        self._index = None
        self._weights = None
        if index is not None:
            self.use_index(index)

    def use_index(self, index: ERIndex) -> ERIndex:
        self._index = index.with_mu(
            entity=self.settings.mu_entity,
            relationship=self.settings.mu_relationship,
            document=self.settings.mu_document,
        )
        return self._index

    @property
    def index(self) -> ERIndex:
        if self._index is None:
            if not self.settings.index_dir:
                raise exc.IndexNotFoundError(data="no index directory set")
            self.use_index(ERIndex.load(self.settings.index_dir))
        return self._index

    def ingest(self, corpus_path: Union[str, Path],
               dump_path: Union[str, Path, None] = None) -> Corpus:
        """
        Validate a corpus, optionally dumping its extractions.
        """
        corpus = load_corpus(corpus_path)
        if dump_path is not None:
            batch = Extractor(self.settings.workers, self.progress).extract(
                corpus
            )
            write_extractions(batch, dump_path)
        return corpus

    def build_index(self, corpus: Corpus,
                    output_dir: Union[str, Path, None] = None) -> ERIndex:
        index = IndexBuilder(
            workers=self.settings.workers,
            extraction_cap=self.settings.extraction_cap,
            progress=self.progress,
        ).build(corpus)
        if output_dir is not None:
            index.save(output_dir)
        return self.use_index(index)

    @property
    def retriever(self) -> Retriever:
        return Retriever(
            self.index,
            self.settings.feature_scorer(),
            k=self.settings.k,
            top_n=self.settings.top_n,
            rerank_depth=self.settings.rerank_depth,
            alpha=self.settings.alpha,
            sdm_weights=self.settings.sdm_weights,
        )

    @property
    def late_fusion(self) -> LateFusion:
        return LateFusion(
            self.index,
            self.settings.feature_scorer(),
            k=self.settings.k,
            top_n=self.settings.top_n,
        )

    @property
    def weights(self) -> FeatureWeights:
        if self._weights is None:
            if self.settings.weights_file:
                self._weights = ranking.load_weights(
                    self.settings.weights_file
                )
            else:
                self._weights = FeatureWeights.unigram()
        return self._weights

    def search(self, query: ERQuery,
               model: Optional[ModelName] = None) -> List[CandidateTuple]:
        """
        Rank tuples for one query.

        :param query: A parsed E-R query.
        :param model: Ranking model, defaulting to settings.model.
        :return: At most top_n tuples, best first.
        """
        model = ModelName(model or self.settings.model)
        if model == ModelName.LF:
            return self.late_fusion.search(query)
        if model == ModelName.ERDM:
            return self.retriever.erdm(query, self.weights)
        return self.retriever.search(query, model)

    def batch_search(self, queries: Sequence[ERQuery],
                     model: Optional[ModelName] = None) -> RunResult:
        results = {
            query.query_id: self.search(query, model)
            for query in tqdm(queries, desc="searching",
                              disable=not self.progress)
        }
        return evaluation.run_from_results(results, self.settings.run_tag)

    def featured_candidates(self, queries: Sequence[ERQuery]
                            ) -> Dict[str, List[CandidateTuple]]:
        retriever = self.retriever
        return {
            query.query_id: retriever.erdm_candidates(query)
            for query in tqdm(queries, desc="features",
                              disable=not self.progress)
        }

    def train(self, queries: Sequence[ERQuery],
              qrels: Qrels) -> CrossValidation:
        """
        Learn ERDM weights with cross-validated coordinate ascent.
        """
        training = ranking.training_queries(
            self.featured_candidates(queries), qrels
        )
        config = self.settings.train_config()
        plan = ranking.make_folds(training, config.fold_count, config.seed)
        validation = ranking.cross_validate(
            training, plan, config, top_n=self.settings.top_n,
            progress=self.progress,
        )
        self._weights = validation.weights
        return validation

    def evaluate(self, run: RunResult, qrels: Qrels,
                 complete: bool = False) -> MetricReport:
        """
        :param complete: Average over every judged query, counting queries
            missing from the run as 0.
        """
        query_ids = None
        if complete:
            query_ids = set(qrels.query_ids()) | set(run.query_ids())
        return evaluation.metrics(run, qrels, query_ids)

    def build_collection(self, tables: Sequence[SourceTable],
                         threshold: float, arity: int = 2,
                         seed: Optional[int] = None
                         ) -> Tuple[List[QuerySkeleton], Qrels]:
        return collection.CollectionBuilder(
            threshold=threshold, seed=seed, arity=arity
        ).build(tables)
