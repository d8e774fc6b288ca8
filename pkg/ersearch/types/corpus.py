from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

from ersearch.types.common import Common


@dataclass(frozen=True)
class Mention(Common):
    """
    An entity annotation over a character span of a document.
    """
    entity_id: str
    start: int
    end: int
    surface: str


@dataclass(frozen=True)
class AnnotatedDocument(Common):
    """
    Raw document text plus its validated mentions, in input order.
    """
    doc_id: str
    text: str
    mentions: Tuple[Mention, ...] = ()


@dataclass(frozen=True)
class Sentence(Common):
    """
    A tokenized sentence of one document.

    mention_spans holds, for every entry of mention_refs, the half-open
    token range covered by the mention.
    """
    doc_id: str
    index: int
    start: int
    end: int
    tokens: Tuple[str, ...]
    mention_refs: Tuple[Mention, ...] = ()
    mention_spans: Tuple[Tuple[int, int], ...] = ()


@dataclass(frozen=True)
class Corpus(Common):
    """
    Immutable collection of annotated documents in file order.
    """
    documents: Tuple[AnnotatedDocument, ...] = ()

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[AnnotatedDocument]:
        return iter(self.documents)

    def get(self, doc_id: str) -> Optional[AnnotatedDocument]:
        return self.by_id().get(doc_id)

    def by_id(self) -> Dict[str, AnnotatedDocument]:
        return {document.doc_id: document for document in self.documents}
