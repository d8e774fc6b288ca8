from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ersearch.types.common import Common


@dataclass
class Qrels(Common):
    """
    query_id -> canonical tuple key -> relevance grade.
    """
    judgments: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def __contains__(self, query_id: str) -> bool:
        return query_id in self.judgments

    def grades(self, query_id: str) -> Dict[str, int]:
        return self.judgments.get(query_id, {})

    def relevant(self, query_id: str) -> List[str]:
        return sorted(
            key for key, grade in self.grades(query_id).items() if grade > 0
        )

    def query_ids(self) -> List[str]:
        return sorted(self.judgments)


@dataclass
class RunResult(Common):
    """
    query_id -> ranked (tuple key, score) list, best first.
    """
    rankings: Dict[str, List[Tuple[str, float]]] = field(default_factory=dict)
    tag: str = "ersearch"

    def query_ids(self) -> List[str]:
        return sorted(self.rankings)

    def ranking(self, query_id: str) -> List[Tuple[str, float]]:
        return self.rankings.get(query_id, [])


@dataclass
class MetricReport(Common):
    per_query: Dict[str, Dict[str, float]] = field(default_factory=dict)
    macro: Dict[str, float] = field(default_factory=dict)
