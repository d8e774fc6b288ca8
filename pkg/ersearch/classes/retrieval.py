import heapq
import logging
from dataclasses import replace
from typing import (
    Callable, Container, Dict, Iterable, Iterator, List, Optional, Sequence,
    Tuple
)

from ersearch.classes.features import FeatureScorer, compat_er, compat_rer
from ersearch.classes.index import ERIndex, IndexPart
from ersearch.const import (
    DEFAULT_ALPHA, DEFAULT_K, DEFAULT_SDM_WEIGHTS, DEFAULT_TOP_N, ModelName
)
from ersearch.exceptions import general as exc
from ersearch.types import (
    CandidateLists, CandidateTuple, ERQuery, FeatureVector, FeatureWeights
)
from ersearch.util import canonical_tuple_key, split_key

logger = logging.getLogger(__name__)

ScoreFunction = Callable[[IndexPart, str, Sequence[str]], float]
Ranked = List[Tuple[str, float]]
Chain = Tuple[Tuple[str, ...], Tuple[str, ...]]


def rank_keys(part: IndexPart, terms: Sequence[str], score: ScoreFunction,
              k: int) -> Ranked:
    """
    Top-k keys of a part containing at least one term, by score
    descending then key ascending.
    """
    scored = [
        (key, score(part, key, terms)) for key in part.matching_keys(terms)
    ]
    return heapq.nsmallest(k, scored, key=lambda item: (-item[1], item[0]))


def generate_candidates(query: ERQuery, index: ERIndex,
                        scorer: FeatureScorer,
                        k: int = DEFAULT_K) -> CandidateLists:
    """
    First-pass unigram ranking of entities for every entity sub-query and
    of pairs for every relationship sub-query.

    Only keys whose meta-document contains at least one sub-query term
    are scored, so a key matching none of them is never a candidate even
    when k exceeds the number of matching keys.
    """
    if k < 1:
        raise exc.ConfigError(data=f"k must be at least 1: {k}")

    return CandidateLists(
        entities=tuple(
            tuple(rank_keys(index.entity, subquery.terms, scorer.unigram, k))
            for subquery in query.entity_subqueries
        ),
        relationships=tuple(
            tuple(rank_keys(
                index.relationship, subquery.terms, scorer.unigram, k
            ))
            for subquery in query.relationship_subqueries
        ),
    )


def chain_join(pair_lists: Sequence[Container[str]],
               entity_filters: Optional[Sequence[Container[str]]] = None
               ) -> Iterator[Chain]:
    """
    Enumerate entity chains whose consecutive pairs share exactly one
    bridge entity.

    Relationship lists drive the join; every pair is tried in both
    orientations. With entity_filters, the entity at position i must
    belong to entity_filters[i].

    Yields
    ------
    tuple
        (entities, pairs) in sub-query order.
    """
    def allowed(position: int, entity_id: str) -> bool:
        return entity_filters is None or entity_id in entity_filters[position]

    by_member: List[Dict[str, List[Tuple[str, str]]]] = []
    for pairs in pair_lists[1:]:
        members: Dict[str, List[Tuple[str, str]]] = {}
        for key in sorted(pairs):
            first, second = split_key(key)
            members.setdefault(first, []).append((key, second))
            members.setdefault(second, []).append((key, first))
        by_member.append(members)

    def extend(entities: List[str], pairs: List[str]) -> Iterator[Chain]:
        position = len(pairs)
        if position == len(pair_lists):
            yield tuple(entities), tuple(pairs)
            return
        for key, other in by_member[position - 1].get(entities[-1], ()):
            if other == entities[-2] or not allowed(position + 1, other):
                continue
            yield from extend(entities + [other], pairs + [key])

    for key in sorted(pair_lists[0]):
        first, second = split_key(key)
        for left, right in ((first, second), (second, first)):
            if allowed(0, left) and allowed(1, right):
                yield from extend([left, right], [key])


def rank_tuples(candidates: Iterable[CandidateTuple],
                limit: Optional[int] = None) -> List[CandidateTuple]:
    """
    Keep the best orientation per canonical key, then sort by score
    descending and key ascending.

    Equal-scoring orientations resolve to the smaller entity sequence.
    """
    best: Dict[str, CandidateTuple] = {}
    for candidate in candidates:
        current = best.get(candidate.key)
        if current is None \
                or candidate.joint_score > current.joint_score \
                or (candidate.joint_score == current.joint_score
                    and candidate.entities < current.entities):
            best[candidate.key] = candidate

    ranked = sorted(
        best.values(), key=lambda item: (-item.joint_score, item.key)
    )
    return ranked[:limit] if limit is not None else ranked


def interleave(entity_scores: Sequence[float],
               pair_scores: Sequence[float]) -> Tuple[float, ...]:
    scores = []
    for position, score in enumerate(entity_scores):
        scores.append(score)
        if position < len(pair_scores):
            scores.append(pair_scores[position])
    return tuple(scores)


def fused_score(entity_scores: Sequence[float],
                pair_scores: Sequence[float]) -> float:
    """
    Early Fusion joint score: entity sub-query scores plus relationship
    sub-query scores.
    """
    return sum(entity_scores) + sum(pair_scores)


def best_first_product(lists: Sequence[Ranked], limit: int,
                       accept: Callable[[Tuple[str, ...]], bool]
                       ) -> List[CandidateTuple]:
    """
    Top tuples of the cross product of ranked lists by summed score.

    Cells are expanded best first, so only the head of the product is
    visited. Rejected combinations are skipped; ties at the cut-off are
    all collected before truncation.
    """
    if not lists or any(not ranked for ranked in lists):
        return []

    def entry(indices):
        entities = tuple(lists[p][i][0] for p, i in enumerate(indices))
        scores = tuple(lists[p][i][1] for p, i in enumerate(indices))
        return -sum(scores), entities, indices, scores

    start = (0,) * len(lists)
    heap = [entry(start)]
    seen = {start}
    best: Dict[str, CandidateTuple] = {}
    cutoff = None

    while heap:
        negative, entities, indices, scores = heapq.heappop(heap)
        if cutoff is not None and -negative < cutoff:
            break

        if accept(entities):
            key = canonical_tuple_key(entities)
            if key not in best:
                best[key] = CandidateTuple(
                    entities=entities, scores=scores, joint_score=-negative
                )
                if cutoff is None and len(best) >= limit:
                    cutoff = -negative

        for position in range(len(lists)):
            if indices[position] + 1 < len(lists[position]):
                following = indices[:position] + (indices[position] + 1,) \
                    + indices[position + 1:]
                if following not in seen:
                    seen.add(following)
                    heapq.heappush(heap, entry(following))

    return rank_tuples(best.values(), limit)


def distinct_neighbours(entities: Tuple[str, ...]) -> bool:
    return all(first != second for first, second in zip(entities, entities[1:]))


class Retriever:
    """
    Early Fusion, ERDM and baseline ranking over an ERIndex.
    """

    def __init__(self, index: ERIndex, scorer: FeatureScorer,
                 k: int = DEFAULT_K, top_n: int = DEFAULT_TOP_N,
                 rerank_depth: Optional[int] = None,
                 alpha: float = DEFAULT_ALPHA,
                 sdm_weights: Sequence[float] = DEFAULT_SDM_WEIGHTS):
        """
        Initialize the Retriever.

        Parameters
        ----------
        index : ERIndex
            Built or loaded index.
        scorer : FeatureScorer
            Feature functions of the LM or BM25 family.
        k : int
            First-pass cut-off per sub-query.
        top_n : int
            Number of tuples returned per query.
        rerank_depth : int, optional
            Restrict ERDM to the top Early Fusion tuples; the whole join
            is featured by default.
        alpha : float
            Popularity smoothing of the entity/pair compatibility feature.
        sdm_weights : sequence of float
            Unigram, ordered and unordered weights of the baselines.
        """
        if not 0 <= alpha <= 1:
            raise exc.ConfigError(data=f"alpha must lie in [0, 1]: {alpha}")
        self.index = index
        self.scorer = scorer
        self.k = k
        self.top_n = top_n
        self.rerank_depth = rerank_depth
        self.alpha = alpha
        self.sdm_weights = tuple(sdm_weights)

    def candidates(self, query: ERQuery) -> CandidateLists:
        return generate_candidates(query, self.index, self.scorer, self.k)

    def oriented(self, query: ERQuery,
                 lists: CandidateLists) -> Iterator[CandidateTuple]:
        """
        Every admissible orientation of every joined tuple, scored by
        Early Fusion.
        """
        entity_scores = lists.entity_scores()
        pair_scores = lists.relationship_scores()

        if query.arity == 1:
            for key, score in lists.entities[0]:
                yield CandidateTuple(entities=(key,), scores=(score,),
                                     joint_score=score)
            return

        for entities, pairs in chain_join(pair_scores, entity_scores):
            entity_part = [
                entity_scores[i][entity] for i, entity in enumerate(entities)
            ]
            pair_part = [pair_scores[j][pair] for j, pair in enumerate(pairs)]
            yield CandidateTuple(
                entities=entities,
                pairs=pairs,
                scores=interleave(entity_part, pair_part),
                joint_score=fused_score(entity_part, pair_part),
            )

    def join(self, query: ERQuery, lists: CandidateLists,
             limit: Optional[int]) -> List[CandidateTuple]:
        """
        Early Fusion join of first-pass lists.
        """
        return rank_tuples(self.oriented(query, lists), limit)

    def early_fusion(self, query: ERQuery) -> List[CandidateTuple]:
        return self.join(query, self.candidates(query), self.top_n)

    def features(self, query: ERQuery, entities: Sequence[str],
                 pairs: Sequence[str], cache: Optional[Dict] = None
                 ) -> FeatureVector:
        """
        Clique-set aggregates of one tuple.
        """
        cache = {} if cache is None else cache

        def textual(part: IndexPart, key: str, terms: Tuple[str, ...]):
            cache_key = (part.name, key, terms)
            if cache_key not in cache:
                cache[cache_key] = self.scorer.textual(part, key, terms)
            return cache[cache_key]

        entity_features = [
            textual(self.index.entity, entity, subquery.terms)
            for entity, subquery in zip(entities, query.entity_subqueries)
        ]
        pair_features = [
            textual(self.index.relationship, pair, subquery.terms)
            for pair, subquery in zip(pairs, query.relationship_subqueries)
        ]

        relationship_count = self.index.relationship_count
        er_s = 0.0
        for position, pair in enumerate(pairs):
            for entity in (entities[position], entities[position + 1]):
                er_s += compat_er(
                    entity, pair, self.index.popularity(entity),
                    relationship_count, self.alpha,
                )
        rer_s = float(sum(
            compat_rer(entities[position], pairs[position - 1], pairs[position])
            for position in range(1, len(pairs))
        ))

        return FeatureVector(
            e_t=sum(item[0] for item in entity_features),
            e_o=sum(item[1] for item in entity_features),
            e_u=sum(item[2] for item in entity_features),
            r_t=sum(item[0] for item in pair_features),
            r_o=sum(item[1] for item in pair_features),
            r_u=sum(item[2] for item in pair_features),
            er_s=er_s,
            rer_s=rer_s,
        )

    def erdm_candidates(self, query: ERQuery) -> List[CandidateTuple]:
        """
        Featured candidates of the full first-pass join.

        Both orientations of a tuple are kept, each with its own features,
        so the weights decide which entity fills which sub-query. With a
        rerank depth, only tuples among the top Early Fusion tuples stay.
        """
        lists = self.candidates(query)
        kept = None
        if self.rerank_depth is not None:
            kept = {
                candidate.key
                for candidate in self.join(query, lists, self.rerank_depth)
            }

        cache: Dict = {}
        return [
            replace(candidate, features=self.features(
                query, candidate.entities, candidate.pairs, cache
            ))
            for candidate in self.oriented(query, lists)
            if kept is None or candidate.key in kept
        ]

    def erdm(self, query: ERQuery, weights: FeatureWeights,
             candidates: Optional[Sequence[CandidateTuple]] = None
             ) -> List[CandidateTuple]:
        """
        Rank tuples by the weighted feature sum of their best orientation.
        """
        if candidates is None:
            candidates = self.erdm_candidates(query)
        tuples = (
            replace(candidate, joint_score=weights.score(candidate.features))
            for candidate in candidates
        )
        return rank_tuples(tuples, self.top_n)

    def _entity_sdm(self, terms: Sequence[str]) -> Ranked:
        return rank_keys(
            self.index.entity, terms,
            self.scorer.sdm_function(self.sdm_weights), self.k,
        )

    def base_ee(self, query: ERQuery) -> List[CandidateTuple]:
        """
        Cross product of one entity run per entity sub-query, each run
        querying with the entity terms and the adjacent relationship terms.
        """
        subqueries = query.subqueries
        lists = []
        for position in range(0, len(subqueries), 2):
            terms = subqueries[position].terms
            if position > 0:
                terms = subqueries[position - 1].terms + terms
            if position + 1 < len(subqueries):
                terms = terms + subqueries[position + 1].terms
            lists.append(self._entity_sdm(terms))
        return best_first_product(lists, self.top_n, distinct_neighbours)

    def base_e(self, query: ERQuery) -> List[CandidateTuple]:
        """
        Cross product of a single entity run, queried with every term of
        the query, with itself.
        """
        ranked = self._entity_sdm(query.terms)
        return best_first_product(
            [ranked] * query.arity, self.top_n, distinct_neighbours
        )

    def base_r(self, query: ERQuery) -> List[CandidateTuple]:
        """
        Full-sentence pair runs, one per relationship sub-query and queried
        with the relationship and both adjacent entity terms, chained on
        shared entities.
        """
        if query.arity == 1:
            return self.base_e(query)

        subqueries = query.subqueries
        score = self.scorer.sdm_function(self.sdm_weights)
        pair_scores = []
        for position in range(1, len(subqueries), 2):
            terms = subqueries[position - 1].terms \
                + subqueries[position].terms + subqueries[position + 1].terms
            pair_scores.append(dict(
                rank_keys(self.index.sentence_pair, terms, score, self.k)
            ))

        tuples = []
        for entities, pairs in chain_join(pair_scores):
            scores = tuple(pair_scores[j][pair] for j, pair in enumerate(pairs))
            tuples.append(CandidateTuple(
                entities=entities, pairs=pairs, scores=scores,
                joint_score=sum(scores),
            ))
        return rank_tuples(tuples, self.top_n)

    def search(self, query: ERQuery, model: ModelName,
               weights: Optional[FeatureWeights] = None
               ) -> List[CandidateTuple]:
        model = ModelName(model)
        logger.debug(f"Searching {query.query_id} with {model.value}")

        if model == ModelName.EF:
            return self.early_fusion(query)
        if model == ModelName.ERDM:
            return self.erdm(query, weights or FeatureWeights.unigram())
        if model == ModelName.BASE_EE:
            return self.base_ee(query)
        if model == ModelName.BASE_E:
            return self.base_e(query)
        if model == ModelName.BASE_R:
            return self.base_r(query)

        raise exc.ConfigError(
            data=f"model {model.value} is not served by the Retriever"
        )
