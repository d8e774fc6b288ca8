from dataclasses import dataclass
from typing import Tuple

from ersearch.types.common import Common
from ersearch.util import tuple_key


@dataclass(frozen=True)
class EntityExtraction(Common):
    """
    One sentence context of an entity.
    """
    entity_id: str
    doc_id: str
    sentence_index: int
    context_terms: Tuple[str, ...]

    @property
    def key(self) -> str:
        return self.entity_id


@dataclass(frozen=True)
class RelationshipExtraction(Common):
    """
    One context of a co-occurring entity pair.

    The pair is stored in lexicographic order; context_terms is the
    separating string, or the whole sentence for sentence-pair extractions.
    """
    pair: Tuple[str, str]
    doc_id: str
    sentence_index: int
    context_terms: Tuple[str, ...]

    @property
    def key(self) -> str:
        return tuple_key(self.pair)


@dataclass(frozen=True)
class ExtractionBatch(Common):
    """
    Every extraction of a corpus, ordered by (doc_id, sentence_index).
    """
    entities: Tuple[EntityExtraction, ...] = ()
    relationships: Tuple[RelationshipExtraction, ...] = ()
    sentence_pairs: Tuple[RelationshipExtraction, ...] = ()
