"""
Synthetic corpora, queries and tables shared by the test cases.
"""
import random
from typing import Dict, List, Optional, Sequence, Tuple

from ersearch.classes.query import parse_query
from ersearch.types import (
    AnnotatedDocument, Cell, Column, Corpus, Mention, SourceTable
)


class TextBuilder:
    """
    Assemble a document token by token while recording mention offsets.
    """

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        self.parts: List[str] = []
        self.length = 0
        self.mentions: List[Mention] = []

    def add(self, token: str, entity_id: Optional[str] = None,
            separator: str = " "):
        if self.parts:
            self.parts.append(separator)
            self.length += len(separator)
        if entity_id is not None:
            self.mentions.append(Mention(
                entity_id=entity_id,
                start=self.length,
                end=self.length + len(token),
                surface=token,
            ))
        self.parts.append(token)
        self.length += len(token)
        return self

    def punctuate(self, mark: str = "."):
        self.parts.append(mark)
        self.length += len(mark)
        return self

    def build(self) -> AnnotatedDocument:
        return AnnotatedDocument(
            doc_id=self.doc_id,
            text="".join(self.parts),
            mentions=tuple(self.mentions),
        )


def make_document(doc_id: str, tokens: Sequence[str],
                  links: Dict[str, str]) -> AnnotatedDocument:
    """
    One-sentence document; every token found in links is a mention.
    """
    builder = TextBuilder(doc_id)
    for token in tokens:
        builder.add(token, links.get(token))
    return builder.build()


# Early Fusion toy collection: |C^E| = 100000, |C^R| = 20000,
# cf(soccer) = 3000, cf(player) = 8000, cf(dated) = 5000.
TOY_LINKS = {
    "brady": "Tom_Brady",
    "ronaldo": "Cristiano_Ronaldo",
    "messi": "Lionel_Messi",
    "figo": "Luis_Figo",
    "gisele": "Gisele_Bundchen",
    "irina": "Irina_Shayik",
    "helen": "Helen_Svedin",
    "fs": "Filler_Soccer",
    "fp": "Filler_Player",
    "ft": "Filler_Top",
    "fa": "Filler_A",
    "fb": "Filler_B",
}

TOY_MU_ENTITY = 1500
TOY_MU_RELATIONSHIP = 500


def _repeat(*groups: Tuple[str, int]) -> List[str]:
    return [word for word, count in groups for _ in range(count)]


def toy_corpus() -> Corpus:
    specs = [
        ("e-brady", ["brady"] + _repeat(("player", 600), ("the", 1597))),
        ("e-ronaldo", ["ronaldo"] + _repeat(
            ("soccer", 800), ("player", 800), ("the", 2797))),
        ("e-messi", ["messi"] + _repeat(
            ("soccer", 700), ("player", 700), ("the", 2599))),
        ("e-figo", ["figo"] + _repeat(
            ("soccer", 200), ("player", 200), ("the", 197))),
        ("e-gisele", ["gisele"] + _repeat(
            ("top", 400), ("model", 400), ("the", 1397))),
        ("e-irina", ["irina"] + _repeat(
            ("top", 300), ("model", 300), ("the", 797))),
        ("e-helen", ["helen"] + _repeat(
            ("top", 150), ("model", 150), ("the", 97))),
        ("e-fs", ["fs"] + _repeat(("soccer", 1300), ("the", 15699))),
        ("e-fp", ["fp"] + _repeat(("player", 5700), ("the", 11299))),
        ("e-ft", ["ft"] + _repeat(
            ("top", 7150), ("model", 3150), ("the", 495))),
        ("r-gisele-brady", ["gisele"] + _repeat(
            ("dated", 500), ("the", 300)) + ["brady"]),
        ("r-irina-ronaldo", ["irina"] + _repeat(
            ("dated", 300), ("the", 300)) + ["ronaldo"]),
        ("r-helen-figo", ["helen"] + _repeat(
            ("dated", 100), ("the", 100)) + ["figo"]),
        ("r-filler", ["fa"] + _repeat(
            ("dated", 4100), ("the", 14300)) + ["fb"]),
    ]
    return Corpus(documents=tuple(
        make_document(doc_id, tokens, TOY_LINKS) for doc_id, tokens in specs
    ))


def toy_query():
    return parse_query({
        "query_id": "toy",
        "subqueries": [
            {"kind": "entity", "terms": "soccer player"},
            {"kind": "relationship", "terms": "dated"},
            {"kind": "entity", "terms": "top model"},
        ],
    })


VOCABULARY = (
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota", "kappa", "lambda", "mu",
)


def random_corpus(seed: int, documents: int = 40, entities: int = 12,
                  vocabulary: Sequence[str] = VOCABULARY,
                  max_sentences: int = 4, max_length: int = 10,
                  mention_rate: float = 0.3) -> Corpus:
    """
    Multi-sentence documents over a small vocabulary with random mentions.
    """
    rng = random.Random(seed)
    docs = []
    for number in range(documents):
        builder = TextBuilder(f"d{number:04d}")
        for _ in range(rng.randint(1, max_sentences)):
            builder.add(rng.choice(vocabulary).capitalize())
            for _ in range(rng.randint(1, max_length)):
                if rng.random() < mention_rate:
                    entity = rng.randrange(entities)
                    builder.add(f"Ent{entity}", f"E{entity:02d}")
                else:
                    builder.add(rng.choice(vocabulary))
            builder.punctuate(rng.choice(".!?"))
        docs.append(builder.build())
    return Corpus(documents=tuple(docs))


def random_query(rng: random.Random, arity: int,
                 vocabulary: Sequence[str] = VOCABULARY, query_id: str = "r"):
    subqueries = []
    for position in range(2 * arity - 1):
        kind = "entity" if position % 2 == 0 else "relationship"
        words = rng.sample(list(vocabulary), rng.randint(1, 2))
        subqueries.append({"kind": kind, "terms": " ".join(words)})
    return parse_query({"query_id": query_id, "subqueries": subqueries})


PLANTED_QUERIES = 10
PLANTED_PAIRS = 3
PLANTED_DISTRACTORS = 5


def planted_corpus() -> Corpus:
    """
    200 one-sentence documents. For every query n three relevant pairs
    co-occur in "a rel b atype btype" sentences, while distractor
    entities carry the type and relationship words without a partner.
    """
    docs = []
    for n in range(PLANTED_QUERIES):
        atype, rel, btype = f"atype{n}", f"rel{n}", f"btype{n}"

        def add(suffix, tokens, links):
            docs.append(make_document(f"q{n}-{suffix}", tokens, links))

        for i in range(1, PLANTED_PAIRS + 1):
            a, b = f"q{n}a{i}", f"q{n}b{i}"
            links = {a: a, b: b}
            add(f"pair{i}", [a, rel, b, atype, btype], links)
            add(f"atype{i}", [a, atype, atype], links)
            add(f"btype{i}", [b, btype, btype], links)
        for i in range(1, PLANTED_DISTRACTORS + 1):
            d, e = f"q{n}d{i}", f"q{n}e{i}"
            add(f"dist-a{i}", [d, atype, atype, rel, rel], {d: d})
            add(f"dist-b{i}", [e, rel, rel, btype, btype], {e: e})

    for j in range(10):
        filler = f"fz{j}"
        docs.append(make_document(
            f"zz-filler{j}", [filler] + ["the"] * 19, {filler: filler}
        ))
    return Corpus(documents=tuple(docs))


def planted_queries():
    return [
        parse_query({
            "query_id": f"q{n}",
            "subqueries": [
                {"kind": "entity", "terms": f"atype{n}"},
                {"kind": "relationship", "terms": f"rel{n}"},
                {"kind": "entity", "terms": f"btype{n}"},
            ],
        })
        for n in range(PLANTED_QUERIES)
    ]


def planted_tables() -> List[SourceTable]:
    """
    One relational table per planted query: the key column lists the
    "a" entities, the second column their "b" partners.
    """
    tables = []
    for n in range(PLANTED_QUERIES):
        tables.append(SourceTable(
            table_id=f"q{n}",
            page_title=f"List of atype{n} and btype{n} pairs",
            columns=(
                Column(header="Alpha", cells=tuple(
                    Cell(text=f"A{i}", entity_id=f"q{n}a{i}")
                    for i in range(1, PLANTED_PAIRS + 1)
                )),
                Column(header="Beta", cells=tuple(
                    Cell(text=f"Beta item {i}", entity_id=f"q{n}b{i}")
                    for i in range(1, PLANTED_PAIRS + 1)
                )),
            ),
        ))
    return tables


def confusable_corpus() -> Corpus:
    """
    Every relevant pair "a rel mate b" has a confuser pair "c mate rel f"
    with the same words in reverse order. The confuser ids sort first, so
    unigram scores tie and the confusers win the tie.
    """
    docs = []
    for n in range(PLANTED_QUERIES):
        atype, rel, mate, btype = f"atype{n}", f"rel{n}", f"mate{n}", f"btype{n}"

        def add(suffix, tokens, links):
            docs.append(make_document(f"q{n}-{suffix}", tokens, links))

        for i in range(1, PLANTED_PAIRS + 1):
            a, b = f"q{n}a{i}", f"q{n}b{i}"
            c, f = f"q{n}c{i}", f"q{n}f{i}"
            links = {a: a, b: b, c: f"q{n}Ac{i}", f: f"q{n}Af{i}"}
            add(f"pair{i}", [a, rel, mate, b, atype, btype], links)
            add(f"atype{i}", [a, atype, atype], links)
            add(f"btype{i}", [b, btype, btype], links)
            add(f"confuser{i}", [c, mate, rel, f, atype, btype], links)
            add(f"ctype{i}", [c, atype, atype], links)
            add(f"ftype{i}", [f, btype, btype], links)
    return Corpus(documents=tuple(docs))


def confusable_queries():
    return [
        parse_query({
            "query_id": f"q{n}",
            "subqueries": [
                {"kind": "entity", "terms": f"atype{n}"},
                {"kind": "relationship", "terms": f"rel{n} mate{n}"},
                {"kind": "entity", "terms": f"btype{n}"},
            ],
        })
        for n in range(PLANTED_QUERIES)
    ]


def planted_key_tables(seed: int, count: int = 50) -> List[Tuple[SourceTable, int]]:
    """
    Tables with a known key column among repeating category columns and
    a numeric year column.
    """
    rng = random.Random(seed)
    categories = ("rock", "pop", "jazz", "folk")
    tables = []
    for number in range(count):
        rows = rng.randint(5, 15)
        key = Column(header="Name", cells=tuple(
            Cell(text=f"Name {number}-{row}", entity_id=f"N{number}_{row}")
            for row in range(rows)
        ))
        genre = Column(header="Genre", cells=tuple(
            Cell(text=rng.choice(categories)) for _ in range(rows)
        ))
        label = Column(header="Label", cells=tuple(
            Cell(text=f"Label {row % 2}", entity_id=f"L{row % 2}")
            for row in range(rows)
        ))
        year = Column(header="Year", cells=tuple(
            Cell(text=str(1950 + row)) for row in range(rows)
        ))
        columns = [genre, label, year]
        position = rng.randint(0, len(columns))
        columns.insert(position, key)
        tables.append((
            SourceTable(table_id=f"t{number}", page_title=f"Table {number}",
                        columns=tuple(columns)),
            position,
        ))
    return tables
