from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ersearch.types.common import Common


@dataclass(frozen=True)
class Cell(Common):
    text: str
    entity_id: Optional[str] = None


@dataclass(frozen=True)
class Column(Common):
    header: str
    cells: Tuple[Cell, ...]


@dataclass(frozen=True)
class SourceTable(Common):
    """
    A normalized relational table with optional entity links per cell.
    """
    table_id: str
    page_title: str
    columns: Tuple[Column, ...]
    table_title: str = ""
    context_paragraph: str = ""

    @property
    def row_count(self) -> int:
        return len(self.columns[0].cells) if self.columns else 0


@dataclass(frozen=True)
class QuerySkeleton(Common):
    """
    Editor-facing query draft derived from one table.

    natural_language and subqueries are filled in by editors; subqueries
    use the query file layout ({"kind": ..., "terms": ...}).
    """
    table_id: str
    key_column: int
    paired_columns: Tuple[int, ...]
    tuples: Tuple[Tuple[str, ...], ...]
    page_title: str = ""
    table_title: str = ""
    context_paragraph: str = ""
    headers: Tuple[str, ...] = ()
    natural_language: Optional[str] = None
    subqueries: Tuple[Dict[str, str], ...] = ()
