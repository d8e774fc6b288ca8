import json
import logging
from pathlib import Path
from typing import Dict, List, Union

from ersearch.const import SubQueryKind
from ersearch.exceptions import general as exc
from ersearch.types import ERQuery, SubQuery
from ersearch.util import tokenize

logger = logging.getLogger(__name__)


def parse_query(record: Dict, location: str = "<query>") -> ERQuery:
    """
    Validate one query object.

    Checks run in a fixed order (length parity, kind alternation, then
    terms), so a rejected query always reports the first broken rule.
    """
    if not isinstance(record, dict):
        raise exc.QueryError(data=f"{location}: expected an object")

    query_id = record.get("query_id")
    raw_subqueries = record.get("subqueries")
    if not isinstance(query_id, str) or not query_id or \
            any(ch.isspace() for ch in query_id):
        raise exc.QueryError(
            data=f"{location}: query_id must be a non-empty token"
        )
    if not isinstance(raw_subqueries, list):
        raise exc.QueryError(data=f"{location}: subqueries must be a list")

    location = f"{location} ({query_id})"

    if len(raw_subqueries) % 2 == 0:
        raise exc.EvenLengthError(
            data=f"{location}: got {len(raw_subqueries)} sub-queries"
        )

    kinds = []
    for position, raw in enumerate(raw_subqueries):
        kind = raw.get("kind") if isinstance(raw, dict) else None
        try:
            kinds.append(SubQueryKind(kind))
        except ValueError:
            raise exc.QueryError(
                data=f"{location}: sub-query {position} has kind {kind!r}"
            )

    for position, kind in enumerate(kinds):
        expected = SubQueryKind.ENTITY if position % 2 == 0 \
            else SubQueryKind.RELATIONSHIP
        if kind != expected:
            raise exc.NonAlternatingError(
                data=f"{location}: sub-query {position} is {kind.value}, "
                f"expected {expected.value}"
            )

    subqueries = []
    for position, (raw, kind) in enumerate(zip(raw_subqueries, kinds)):
        text = raw.get("terms")
        if isinstance(text, list):
            text = " ".join(str(term) for term in text)
        terms = tuple(tokenize(text)) if isinstance(text, str) else ()
        if not terms:
            raise exc.EmptyTermsError(
                data=f"{location}: sub-query {position} ({kind.value})"
            )
        subqueries.append(SubQuery(kind=kind, terms=terms, text=text))

    natural_language = record.get("natural_language")
    return ERQuery(
        query_id=query_id,
        subqueries=tuple(subqueries),
        natural_language=natural_language
        if isinstance(natural_language, str) else None,
    )


def parse_queries(path: Union[str, Path]) -> List[ERQuery]:
    """
    Load a query file: a JSON list of query objects or a single object.
    """
    path = Path(path)
    if not path.is_file():
        raise exc.QueryError(data=f"{path}: file not found")

    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise exc.QueryError(
            data=f"{path}:{error.lineno}: {error.msg}"
        )

    records = data if isinstance(data, list) else [data]
    queries = [
        parse_query(record, location=f"{path}[{position}]")
        for position, record in enumerate(records)
    ]

    seen = set()
    for query in queries:
        if query.query_id in seen:
            raise exc.QueryError(
                data=f"{path}: duplicate query_id {query.query_id}"
            )
        seen.add(query.query_id)

    logger.info(f"Parsed {len(queries)} queries from {path}")
    return queries


def serialize_query(query: ERQuery) -> Dict:
    record = {
        "query_id": query.query_id,
        "subqueries": [
            {"kind": subquery.kind.value, "terms": subquery.text}
            for subquery in query.subqueries
        ],
    }
    if query.natural_language is not None:
        record["natural_language"] = query.natural_language
    return record


def write_queries(queries: List[ERQuery], path: Union[str, Path]):
    Path(path).write_text(
        json.dumps([serialize_query(query) for query in queries], indent=2,
                   ensure_ascii=False),
        encoding="utf-8",
    )
