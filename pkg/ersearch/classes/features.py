"""
Feature functions of the retrieval models.

All logarithms are base 10.
"""
import math
from typing import Callable, Sequence, Tuple

from ersearch.classes.index import IndexPart
from ersearch.const import (
    DEFAULT_ALPHA, DEFAULT_B, DEFAULT_K1, DEFAULT_SDM_WEIGHTS, DEFAULT_WINDOW,
    UNSEEN_TERM_SCORE, ScorerFamily
)
from ersearch.exceptions import general as exc
from ersearch.types import TermStats
from ersearch.util import split_key


def lm_unigram(stats: TermStats) -> float:
    """
    Dirichlet-smoothed log likelihood of one term:
    log10((tf + mu * cf / |C|) / (|D| + mu)).

    A term absent from the whole collection yields UNSEEN_TERM_SCORE.
    """
    if stats.cf == 0 and stats.tf == 0:
        return UNSEEN_TERM_SCORE
    background = stats.mu * stats.cf / stats.total_terms
    if stats.length + stats.mu <= 0:
        return UNSEEN_TERM_SCORE
    return math.log10((stats.tf + background) / (stats.length + stats.mu))


def bm25_unigram(stats: TermStats, k1: float = DEFAULT_K1,
                 b: float = DEFAULT_B) -> float:
    """
    BM25 weight of one term; the IDF part is not clamped.
    """
    if stats.tf == 0 or stats.avg_length <= 0:
        return 0.0
    idf = math.log10(
        (stats.doc_count - stats.df + 0.5) / (stats.df + 0.5)
    )
    norm = k1 * (1 - b + b * stats.length / stats.avg_length)
    return idf * stats.tf * (k1 + 1) / (stats.tf + norm)


def compat_er(entity_id: str, pair: str, popularity: int,
              relationship_count: int, alpha: float = DEFAULT_ALPHA) -> float:
    """
    Membership of an entity in a pair, Jelinek-Mercer smoothed with the
    entity popularity n(E) / N^R.
    """
    member = 1.0 if entity_id in split_key(pair) else 0.0
    prior = popularity / relationship_count if relationship_count else 0.0
    return (1 - alpha) * member + alpha * prior


def compat_rer(entity_id: str, first_pair: str, second_pair: str) -> int:
    """
    1 iff the entity is shared by both pairs.
    """
    return int(
        entity_id in split_key(first_pair)
        and entity_id in split_key(second_pair)
    )


class FeatureScorer:
    """
    Textual feature functions of one scoring family over any index part.
    """

    def __init__(self, family: ScorerFamily = ScorerFamily.LM,
                 k1: float = DEFAULT_K1, b: float = DEFAULT_B,
                 window: int = DEFAULT_WINDOW):
        self.family = ScorerFamily(family)
        self.k1 = k1
        self.b = b
        self.window = window
        if window < 2:
            raise exc.ConfigError(data=f"window must be at least 2: {window}")

    def weight(self, stats: TermStats) -> float:
        if self.family == ScorerFamily.LM:
            return lm_unigram(stats)
        return bm25_unigram(stats, self.k1, self.b)

    def unigram(self, part: IndexPart, key: str,
                terms: Sequence[str]) -> float:
        return sum(
            self.weight(part.unigram_stats(key, term)) for term in terms
        )

    def ordered(self, part: IndexPart, key: str,
                terms: Sequence[str]) -> float:
        return sum(
            self.weight(part.ordered_bigram_stats(key, first, second))
            for first, second in zip(terms, terms[1:])
        )

    def unordered(self, part: IndexPart, key: str,
                  terms: Sequence[str]) -> float:
        return sum(
            self.weight(
                part.unordered_window_stats(key, first, second, self.window)
            )
            for first, second in zip(terms, terms[1:])
        )

    def textual(self, part: IndexPart, key: str,
                terms: Sequence[str]) -> Tuple[float, float, float]:
        """
        Unigram, ordered-phrase and unordered-window features.
        """
        return (
            self.unigram(part, key, terms),
            self.ordered(part, key, terms),
            self.unordered(part, key, terms),
        )

    def sdm(self, part: IndexPart, key: str, terms: Sequence[str],
            weights: Sequence[float] = DEFAULT_SDM_WEIGHTS) -> float:
        """
        Sequential dependence score, a weighted sum of the three
        textual features.
        """
        unigram_weight, ordered_weight, unordered_weight = weights
        score = unigram_weight * self.unigram(part, key, terms)
        if ordered_weight:
            score += ordered_weight * self.ordered(part, key, terms)
        if unordered_weight:
            score += unordered_weight * self.unordered(part, key, terms)
        return score

    def sdm_function(self, weights: Sequence[float] = DEFAULT_SDM_WEIGHTS
                     ) -> Callable[[IndexPart, str, Sequence[str]], float]:
        return lambda part, key, terms: self.sdm(part, key, terms, weights)

    def document_weight(self, score: float) -> float:
        """
        Contribution of one raw document to Late Fusion aggregation:
        the likelihood for LM, the score itself for BM25.
        """
        if self.family == ScorerFamily.LM:
            return 10 ** score
        return score
