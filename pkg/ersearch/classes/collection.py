import json
import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from ersearch.classes.query import parse_query
from ersearch.const import JACCARD_THRESHOLD, KEY_COLUMN_THRESHOLD
from ersearch.exceptions import general as general_exc
from ersearch.exceptions import ranking as exc
from ersearch.types import Column, Qrels, QuerySkeleton, SourceTable
from ersearch.util import canonical_tuple_key, jaccard, title_tokens

logger = logging.getLogger(__name__)

NUMERIC = re.compile(r"^[\d\s.,:;%/$€£+\-–]+$")
LINKED_SHARE = 0.5
NUMERIC_SHARE = 0.5


def is_numeric(text: str) -> bool:
    text = text.strip()
    return bool(text) and bool(NUMERIC.match(text)) and \
        any(ch.isdigit() for ch in text)


def load_tables(path: Union[str, Path]) -> List[SourceTable]:
    """
    Read a JSON list of tables and check their shape.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as error:
        raise exc.TableFormatError(data=f"{path}: {error}")
    except json.JSONDecodeError as error:
        raise exc.TableFormatError(data=f"{path}:{error.lineno}: {error.msg}")

    records = data if isinstance(data, list) else [data]
    return [
        validate_table(record, f"{path}[{position}]")
        for position, record in enumerate(records)
    ]


def validate_table(record, location: str = "<table>") -> SourceTable:
    if not isinstance(record, dict) or not isinstance(
            record.get("columns"), list):
        raise exc.TableFormatError(data=f"{location}: expected columns")
    if not record.get("table_id") or "page_title" not in record:
        raise exc.TableFormatError(
            data=f"{location}: table_id and page_title are required"
        )

    try:
        table = SourceTable.from_dict(record)
    except (TypeError, AttributeError) as error:
        raise exc.TableFormatError(data=f"{location}: {error}")

    if len(table.columns) < 2:
        raise exc.TableFormatError(
            data=f"{location}: {table.table_id} has fewer than 2 columns"
        )
    lengths = {len(column.cells) for column in table.columns}
    if len(lengths) != 1:
        raise exc.TableFormatError(
            data=f"{location}: {table.table_id} is not rectangular"
        )
    if table.row_count < 1:
        raise exc.TableFormatError(
            data=f"{location}: {table.table_id} has no rows"
        )
    return table


def uniqueness(column: Column) -> float:
    texts = [cell.text.strip().lower() for cell in column.cells]
    return len(set(texts)) / len(texts) if texts else 0.0


def linked_share(column: Column) -> float:
    if not column.cells:
        return 0.0
    return sum(1 for cell in column.cells if cell.entity_id) / len(column.cells)


def detect_key_column(table: SourceTable,
                      threshold: float = KEY_COLUMN_THRESHOLD
                      ) -> Optional[int]:
    """
    Index of the column holding the main entity of each row.

    The most unique non-numeric column wins, shorter average text breaking
    ties, then the leftmost column. No column qualifies below the
    uniqueness threshold.
    """
    best = None
    for index, column in enumerate(table.columns):
        texts = [cell.text for cell in column.cells]
        numeric = sum(1 for text in texts if is_numeric(text))
        if texts and numeric / len(texts) >= NUMERIC_SHARE:
            continue
        average_length = float(np.mean([len(text) for text in texts]))
        rank = (-uniqueness(column), average_length, index)
        if best is None or rank < best:
            best = rank

    if best is None or -best[0] < threshold:
        return None
    return best[2]


def linked_columns(table: SourceTable, exclude: Sequence[int] = ()) -> List[int]:
    return [
        index for index, column in enumerate(table.columns)
        if index not in exclude and linked_share(column) >= LINKED_SHARE
    ]


def is_relational(table: SourceTable) -> bool:
    """
    A table is relational when its key column and at least one other
    column are entity-linked.
    """
    key = detect_key_column(table)
    if key is None or linked_share(table.columns[key]) < LINKED_SHARE:
        return False
    return bool(linked_columns(table, exclude=[key]))


def extract_tuples(table: SourceTable, key_column: int, other_column: int,
                   third_column: Optional[int] = None,
                   query_id: Optional[str] = None
                   ) -> Tuple[List[Tuple[str, ...]], List[str]]:
    """
    Entity tuples of every fully linked row plus their qrels lines.

    Parameters
    ----------
    table : SourceTable
        Source table.
    key_column, other_column : int
        Columns forming a pair (key, other).
    third_column : int, optional
        When given, rows yield triples (other, key, third), the key entity
        in the middle of the chain.
    query_id : str, optional
        Query id of the qrels lines, defaulting to the table id.

    Returns
    -------
    tuple
        (tuples, qrels_lines); qrels lines are unique and sorted.
    """
    query_id = query_id or table.table_id
    columns = [key_column, other_column] if third_column is None \
        else [other_column, key_column, third_column]

    tuples = []
    for row in range(table.row_count):
        cells = [table.columns[column].cells[row] for column in columns]
        if not all(cell.entity_id for cell in cells):
            continue
        entities = tuple(cell.entity_id for cell in cells)
        if len(set(entities)) < len(entities):
            continue
        tuples.append(entities)

    keys = sorted({canonical_tuple_key(entities) for entities in tuples})
    return tuples, [f"{query_id} 0 {key} 1" for key in keys]


def sample_tables(tables: Sequence[SourceTable],
                  threshold: float = JACCARD_THRESHOLD,
                  seed: Optional[int] = None) -> List[SourceTable]:
    """
    Greedy diversity sampling by page title.

    A table is admitted when the Jaccard similarity of its title tokens
    with every admitted title is at most the threshold. Tables are visited
    in input order, or in a seeded random order.
    """
    order = list(range(len(tables)))
    if seed is not None:
        order = list(np.random.RandomState(seed).permutation(len(tables)))

    admitted: List[SourceTable] = []
    admitted_tokens: List[Set[str]] = []
    for index in order:
        tokens = title_tokens(tables[index].page_title)
        if all(jaccard(tokens, other) <= threshold
               for other in admitted_tokens):
            admitted.append(tables[index])
            admitted_tokens.append(tokens)
    return admitted


def validate_skeleton(skeleton: QuerySkeleton):
    """
    Check editor-filled sub-queries through the query parser.

    Returns
    -------
    ERQuery
        The parsed query; its arity must match the candidate tuples.
    """
    query = parse_query(
        {
            "query_id": skeleton.table_id,
            "subqueries": list(skeleton.subqueries),
            "natural_language": skeleton.natural_language,
        },
        location=f"skeleton {skeleton.table_id}",
    )
    arity = len(skeleton.tuples[0]) if skeleton.tuples else query.arity
    if query.arity != arity:
        raise exc.CollectionError(
            data=f"{skeleton.table_id}: query arity {query.arity}, "
            f"tuple arity {arity}"
        )
    return query


def write_skeletons(skeletons: Sequence[QuerySkeleton],
                    path: Union[str, Path]):
    Path(path).write_text(
        json.dumps([s.as_dict() for s in skeletons], indent=2,
                   ensure_ascii=False),
        encoding="utf-8",
    )


def load_skeletons(path: Union[str, Path]) -> List[QuerySkeleton]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return [QuerySkeleton.from_dict(item) for item in data]
    except (OSError, ValueError, TypeError, AttributeError) as error:
        raise exc.CollectionError(data=f"{path}: {error}")


class CollectionBuilder:
    """
    Turn relational tables into query skeletons and relevance judgments.
    """

    def __init__(self, threshold: float = JACCARD_THRESHOLD,
                 seed: Optional[int] = None, arity: int = 2):
        if arity not in (2, 3):
            raise general_exc.ConfigError(data=f"arity must be 2 or 3: {arity}")
        self.threshold = threshold
        self.seed = seed
        self.arity = arity

    def skeleton(self, table: SourceTable) -> Optional[QuerySkeleton]:
        if not is_relational(table):
            return None

        key = detect_key_column(table)
        others = linked_columns(table, exclude=[key])
        if len(others) < self.arity - 1:
            return None

        paired = others[:self.arity - 1]
        tuples, _ = extract_tuples(table, key, *paired)
        if not tuples:
            return None

        return QuerySkeleton(
            table_id=table.table_id,
            key_column=key,
            paired_columns=tuple(paired),
            tuples=tuple(tuples),
            page_title=table.page_title,
            table_title=table.table_title,
            context_paragraph=table.context_paragraph,
            headers=tuple(column.header for column in table.columns),
        )

    def build(self, tables: Sequence[SourceTable]
              ) -> Tuple[List[QuerySkeleton], Qrels]:
        selected = sample_tables(tables, self.threshold, self.seed)

        skeletons = []
        judgments: Dict[str, Dict[str, int]] = {}
        for table in selected:
            skeleton = self.skeleton(table)
            if skeleton is None:
                logger.debug(f"Table {table.table_id} is not relational")
                continue
            skeletons.append(skeleton)
            _, lines = extract_tuples(
                table, skeleton.key_column, *skeleton.paired_columns
            )
            for line in lines:
                query_id, _, key, grade = line.split()
                judgments.setdefault(query_id, {})[key] = int(grade)

        logger.info(
            f"Built {len(skeletons)} skeletons from {len(selected)} of "
            f"{len(tables)} tables"
        )
        return skeletons, Qrels(judgments=judgments)
