from dataclasses import dataclass
from typing import Optional, Tuple

from ersearch.const import SubQueryKind
from ersearch.types.common import Common


@dataclass(frozen=True)
class SubQuery(Common):
    """
    A keyword sub-query describing an entity type or a relationship.
    """
    kind: SubQueryKind
    terms: Tuple[str, ...]
    text: str


@dataclass(frozen=True)
class ERQuery(Common):
    """
    Alternating entity and relationship sub-queries.
    """
    query_id: str
    subqueries: Tuple[SubQuery, ...]
    natural_language: Optional[str] = None

    @property
    def arity(self) -> int:
        return (len(self.subqueries) + 1) // 2

    @property
    def entity_subqueries(self) -> Tuple[SubQuery, ...]:
        return self.subqueries[0::2]

    @property
    def relationship_subqueries(self) -> Tuple[SubQuery, ...]:
        return self.subqueries[1::2]

    @property
    def terms(self) -> Tuple[str, ...]:
        """
        Terms of every sub-query concatenated in order.
        """
        return tuple(
            term for subquery in self.subqueries for term in subquery.terms
        )
