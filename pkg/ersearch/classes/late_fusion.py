import logging
from typing import Dict, List, Sequence, Tuple

from ersearch.classes.features import FeatureScorer
from ersearch.classes.index import ERIndex
from ersearch.classes.retrieval import (
    chain_join, interleave, rank_keys, rank_tuples
)
from ersearch.const import DEFAULT_K, DEFAULT_TOP_N
from ersearch.types import CandidateTuple, ERQuery

logger = logging.getLogger(__name__)


class LateFusion:
    """
    Rank tuples from raw documents: every sub-query retrieves documents,
    whose scores are spread over the entities and pairs they mention.
    """

    def __init__(self, index: ERIndex, scorer: FeatureScorer,
                 k: int = DEFAULT_K, top_n: int = DEFAULT_TOP_N):
        self.index = index
        self.scorer = scorer
        self.k = k
        self.top_n = top_n

    def documents(self, terms: Sequence[str]) -> List[Tuple[str, float]]:
        return rank_keys(self.index.document, terms, self.scorer.unigram,
                         self.k)

    def entity_scores(self, terms: Sequence[str]) -> Dict[str, float]:
        """
        Sum of document weights over the top documents mentioning each
        entity.
        """
        scores: Dict[str, float] = {}
        for doc_id, score in self.documents(terms):
            weight = self.scorer.document_weight(score)
            for entity_id in self.index.document_entities(doc_id):
                scores[entity_id] = scores.get(entity_id, 0.0) + weight
        return scores

    def pair_scores(self, terms: Sequence[str]) -> Dict[str, float]:
        """
        Sum of document weights over the top documents mentioning both
        members of each pair.
        """
        scores: Dict[str, float] = {}
        for doc_id, score in self.documents(terms):
            weight = self.scorer.document_weight(score)
            for pair in self.index.document_pairs(doc_id):
                scores[pair] = scores.get(pair, 0.0) + weight
        return scores

    def search(self, query: ERQuery) -> List[CandidateTuple]:
        """
        Form tuples from the pairs of the relationship sub-queries.

        An entity retrieved by no document of its entity sub-query adds
        nothing; when both orientations of a chain are possible the better
        one is kept.
        """
        entity_scores = [
            self.entity_scores(subquery.terms)
            for subquery in query.entity_subqueries
        ]

        if query.arity == 1:
            return rank_tuples(
                (
                    CandidateTuple(entities=(entity,), scores=(score,),
                                   joint_score=score)
                    for entity, score in entity_scores[0].items()
                ),
                self.top_n,
            )

        pair_scores = [
            self.pair_scores(subquery.terms)
            for subquery in query.relationship_subqueries
        ]

        tuples = []
        for entities, pairs in chain_join(pair_scores):
            entity_part = [
                entity_scores[i].get(entity, 0.0)
                for i, entity in enumerate(entities)
            ]
            pair_part = [pair_scores[j][pair] for j, pair in enumerate(pairs)]
            tuples.append(CandidateTuple(
                entities=entities,
                pairs=pairs,
                scores=interleave(entity_part, pair_part),
                joint_score=sum(entity_part) + sum(pair_part),
            ))

        logger.debug(f"{query.query_id}: {len(tuples)} late fusion chains")
        return rank_tuples(tuples, self.top_n)
