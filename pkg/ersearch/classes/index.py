import copy
import gzip
import json
import logging
from collections import Counter, deque
from itertools import chain, combinations
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from ersearch.classes.extraction import Extractor
from ersearch.const import INDEX_FORMAT, INDEX_FORMAT_VERSION, IndexPartName
from ersearch.exceptions import general as exc
from ersearch.types import (
    CollectionStats, Corpus, ExtractionBatch, MetaDocument, TermStats
)
from ersearch.util import pair_key, split_key, tokenize

logger = logging.getLogger(__name__)

Posting = Tuple[int, int]

ORDERED = "ordered"
UNORDERED = "unordered"


def build_meta_document(key: str, contexts: Iterable[Sequence[str]]) -> MetaDocument:
    contexts = tuple(tuple(context) for context in contexts)
    term_freqs = dict(Counter(chain.from_iterable(contexts)))
    return MetaDocument(
        key=key,
        contexts=contexts,
        term_freqs=term_freqs,
        length=sum(term_freqs.values()),
    )


def ordered_matches(first: List[Posting], second: List[Posting]) -> int:
    """
    Occurrences of the second term directly after the first term.
    """
    positions = set(first)
    return sum(1 for context, position in second
               if (context, position - 1) in positions)


def window_matches(first: List[Posting], second: List[Posting],
                   window: int, same: bool = False) -> int:
    """
    Co-occurrences of two terms within `window` contiguous tokens.

    Distinct terms are matched greedily left to right, each occurrence
    pairing with the oldest unmatched occurrence of the other term that is
    at most window - 1 positions back. For a repeated term, every
    occurrence with an earlier occurrence in reach counts once.
    """
    reach = window - 1

    if same:
        return sum(
            1 for (context, position), (previous_context, previous) in
            zip(first[1:], first)
            if context == previous_context and position - previous <= reach
        )

    events = sorted(
        [(context, position, 0) for context, position in first]
        + [(context, position, 1) for context, position in second]
    )
    pending = (deque(), deque())
    current = None
    count = 0

    for context, position, side in events:
        if context != current:
            pending[0].clear()
            pending[1].clear()
            current = context

        other = pending[1 - side]
        while other and position - other[0] > reach:
            other.popleft()

        if other:
            other.popleft()
            count += 1
        else:
            pending[side].append(position)

    return count


class IndexPart:
    """
    One immutable collection of meta-documents with positional postings.

    Positions are kept per context so that phrase and window statistics
    never span two extractions.
    """

    def __init__(self, name: str, documents: Iterable[MetaDocument],
                 mu: Optional[float] = None,
                 extraction_cap: Optional[int] = None):
        """
        Initialize the IndexPart.

        Parameters
        ----------
        name : str
            Part name, one of IndexPartName.
        documents : iterable of MetaDocument
            Meta-documents, stored in key order.
        mu : float, optional
            Dirichlet prior; defaults to the average document length.
        extraction_cap : int, optional
            Cap applied when the contexts were grouped, kept for reporting.
        """
        self.name = name
        self.documents: Dict[str, MetaDocument] = {
            document.key: document
            for document in sorted(documents, key=lambda item: item.key)
        }
        self.mu_override = mu
        self.extraction_cap = extraction_cap

        self.cf: Dict[str, int] = Counter()
        self.df: Dict[str, int] = Counter()
        self.postings: Dict[str, Dict[str, List[Posting]]] = {}

        for key, document in self.documents.items():
            for term, count in document.term_freqs.items():
                self.cf[term] += count
                self.df[term] += 1
            for context_index, context in enumerate(document.contexts):
                for position, term in enumerate(context):
                    self.postings.setdefault(term, {}).setdefault(
                        key, []
                    ).append((context_index, position))

        self.total_terms = sum(d.length for d in self.documents.values())
        self.doc_count = len(self.documents)
        self.avg_length = (
            self.total_terms / self.doc_count if self.doc_count else 0.0
        )
        self._pair_cache: Dict[Tuple, Tuple[Dict[str, int], int, int]] = {}

    @classmethod
    def from_contexts(cls, name: str,
                      grouped: Dict[str, List[Sequence[str]]],
                      mu: Optional[float] = None,
                      extraction_cap: Optional[int] = None) -> "IndexPart":
        """
        Fuse grouped contexts into meta-documents, keeping at most
        `extraction_cap` contexts per key.
        """
        documents = [
            build_meta_document(
                key, contexts[:extraction_cap] if extraction_cap else contexts
            )
            for key, contexts in grouped.items()
        ]
        return cls(name, documents, mu=mu, extraction_cap=extraction_cap)

    def __contains__(self, key: str) -> bool:
        return key in self.documents

    def __len__(self) -> int:
        return self.doc_count

    def keys(self) -> List[str]:
        return list(self.documents)

    @property
    def mu(self) -> float:
        if self.mu_override is not None:
            return self.mu_override
        return self.avg_length

    def with_mu(self, mu: Optional[float]) -> "IndexPart":
        """
        Shallow copy sharing all statistics, with another Dirichlet prior.
        """
        if mu is not None and mu <= 0:
            raise exc.ConfigError(data=f"{self.name}: mu must be positive")
        clone = copy.copy(self)
        clone.mu_override = mu
        return clone

    def meta(self, key: str) -> MetaDocument:
        try:
            return self.documents[key]
        except KeyError:
            raise exc.UnknownKeyError(data=f"{self.name}: {key!r}")

    def matching_keys(self, terms: Iterable[str]) -> List[str]:
        """
        Keys of meta-documents containing at least one of the terms.
        """
        keys = set()
        for term in set(terms):
            keys.update(self.postings.get(term, ()))
        return sorted(keys)

    def _stats(self, key: str, tf: int, cf: int, df: int) -> TermStats:
        return TermStats(
            tf=tf,
            cf=cf,
            df=df,
            length=self.meta(key).length,
            total_terms=self.total_terms,
            doc_count=self.doc_count,
            avg_length=self.avg_length,
            mu=self.mu,
        )

    def unigram_stats(self, key: str, term: str) -> TermStats:
        document = self.meta(key)
        return self._stats(
            key,
            tf=document.term_freqs.get(term, 0),
            cf=self.cf.get(term, 0),
            df=self.df.get(term, 0),
        )

    def ordered_bigram_stats(self, key: str, first: str,
                             second: str) -> TermStats:
        self.meta(key)
        counts, cf, df = self._pair_counts(ORDERED, first, second, 2)
        return self._stats(key, counts.get(key, 0), cf, df)

    def unordered_window_stats(self, key: str, first: str, second: str,
                               window: int = 8) -> TermStats:
        if window < 2:
            raise exc.ConfigError(data=f"window must be at least 2: {window}")
        self.meta(key)
        counts, cf, df = self._pair_counts(UNORDERED, first, second, window)
        return self._stats(key, counts.get(key, 0), cf, df)

    def _pair_counts(self, mode: str, first: str, second: str, window: int):
        if mode == UNORDERED and first > second:
            first, second = second, first

        cache_key = (mode, first, second, window)
        if cache_key in self._pair_cache:
            return self._pair_cache[cache_key]

        first_postings = self.postings.get(first, {})
        second_postings = self.postings.get(second, {})

        counts = {}
        for key in sorted(first_postings.keys() & second_postings.keys()):
            if mode == ORDERED:
                count = ordered_matches(
                    first_postings[key], second_postings[key]
                )
            else:
                count = window_matches(
                    first_postings[key], second_postings[key], window,
                    same=first == second,
                )
            if count:
                counts[key] = count

        result = (counts, sum(counts.values()), len(counts))
        self._pair_cache[cache_key] = result
        return result

    def stats(self) -> CollectionStats:
        return CollectionStats(
            name=self.name,
            total_terms=self.total_terms,
            doc_count=self.doc_count,
            avg_length=self.avg_length,
            mu=self.mu,
            vocabulary_size=len(self.cf),
            context_count=sum(
                len(document.contexts) for document in self.documents.values()
            ),
            extraction_cap=self.extraction_cap,
        )

    def to_json(self) -> Dict:
        return {
            "name": self.name,
            "mu": self.mu_override,
            "extraction_cap": self.extraction_cap,
            "documents": [
                {"key": key, "contexts": [list(c) for c in document.contexts]}
                for key, document in self.documents.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Dict) -> "IndexPart":
        return cls(
            data["name"],
            [
                build_meta_document(item["key"], item["contexts"])
                for item in data["documents"]
            ],
            mu=data.get("mu"),
            extraction_cap=data.get("extraction_cap"),
        )


class ERIndex:
    """
    The entity, relationship, sentence-pair and document indexes plus
    the binary association sets tying them together.
    """

    def __init__(self, entity: IndexPart, relationship: IndexPart,
                 sentence_pair: IndexPart, document: IndexPart,
                 doc_entities: Dict[str, Tuple[str, ...]]):
        self.entity = entity
        self.relationship = relationship
        self.sentence_pair = sentence_pair
        self.document = document
        self.doc_entities = {
            doc_id: tuple(sorted(set(entities)))
            for doc_id, entities in doc_entities.items()
        }

        membership: Dict[str, List[str]] = {}
        for key in self.relationship.keys():
            for entity_id in split_key(key):
                membership.setdefault(entity_id, []).append(key)
        self.membership = {
            entity_id: tuple(keys) for entity_id, keys in membership.items()
        }

    def part(self, name: Union[str, IndexPartName]) -> IndexPart:
        return getattr(self, IndexPartName(name).value)

    def parts(self) -> Dict[str, IndexPart]:
        return {name.value: self.part(name) for name in IndexPartName}

    def popularity(self, entity_id: str) -> int:
        """
        n(E): number of distinct relationship meta-documents containing E.
        """
        return len(self.membership.get(entity_id, ()))

    @property
    def relationship_count(self) -> int:
        return self.relationship.doc_count

    def document_entities(self, doc_id: str) -> Tuple[str, ...]:
        return self.doc_entities.get(doc_id, ())

    def document_pairs(self, doc_id: str) -> List[str]:
        """
        Pairs R with w(R, D) = 1, i.e. both members mentioned in D.
        """
        return [
            pair_key(first, second)
            for first, second in combinations(self.document_entities(doc_id), 2)
        ]

    def with_mu(self, entity: Optional[float] = None,
                relationship: Optional[float] = None,
                document: Optional[float] = None) -> "ERIndex":
        clone = copy.copy(self)
        if entity is not None:
            clone.entity = self.entity.with_mu(entity)
        if relationship is not None:
            clone.relationship = self.relationship.with_mu(relationship)
            clone.sentence_pair = self.sentence_pair.with_mu(relationship)
        if document is not None:
            clone.document = self.document.with_mu(document)
        return clone

    def describe(self) -> Dict[str, Dict]:
        return {name: part.stats().as_dict()
                for name, part in self.parts().items()}

    def save(self, path: Union[str, Path]):
        """
        Write the index as a directory of gzipped JSON parts and a manifest.
        """
        directory = Path(path)
        directory.mkdir(parents=True, exist_ok=True)

        for name, part in self.parts().items():
            _write_gzip_json(directory / f"{name}.json.gz", part.to_json())
        _write_gzip_json(
            directory / "associations.json.gz",
            {doc_id: list(ids) for doc_id, ids in self.doc_entities.items()},
        )

        manifest = {
            "format": INDEX_FORMAT,
            "version": INDEX_FORMAT_VERSION,
            "parts": self.describe(),
        }
        (directory / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )
        logger.info(f"Saved index to {directory}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ERIndex":
        directory = Path(path)
        manifest_path = directory / "manifest.json"
        if not manifest_path.is_file():
            raise exc.IndexNotFoundError(data=str(directory))

        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as error:
            raise exc.IndexFormatError(data=f"{manifest_path}: {error.msg}")

        if manifest.get("format") != INDEX_FORMAT or \
                manifest.get("version") != INDEX_FORMAT_VERSION:
            raise exc.IndexFormatError(
                data=f"{directory}: {manifest.get('format')} "
                f"v{manifest.get('version')}"
            )

        try:
            parts = {
                name.value: IndexPart.from_json(
                    _read_gzip_json(directory / f"{name.value}.json.gz")
                )
                for name in IndexPartName
            }
            associations = _read_gzip_json(directory / "associations.json.gz")
        except (OSError, KeyError, ValueError) as error:
            raise exc.IndexFormatError(data=f"{directory}: {error}")

        logger.info(f"Loaded index from {directory}")
        return cls(doc_entities=associations, **parts)


def _write_gzip_json(path: Path, data):
    with gzip.open(path, "wt", encoding="utf-8") as stream:
        json.dump(data, stream, ensure_ascii=False)


def _read_gzip_json(path: Path):
    with gzip.open(path, "rt", encoding="utf-8") as stream:
        return json.load(stream)


class IndexBuilder:
    """
    Build an ERIndex from a validated corpus.
    """

    def __init__(self, workers: int = 1, extraction_cap: Optional[int] = None,
                 progress: bool = False):
        self.extractor = Extractor(workers=workers, progress=progress)
        self.extraction_cap = extraction_cap
        self.progress = progress

    def build(self, corpus: Corpus) -> ERIndex:
        batch = self.extractor.extract(corpus)
        return self.from_extractions(batch, corpus)

    def from_extractions(self, batch: ExtractionBatch,
                         corpus: Corpus) -> ERIndex:
        """
        Group extractions by key in (doc_id, sentence_index) order.
        """
        cap = self.extraction_cap

        entity = IndexPart.from_contexts(
            IndexPartName.ENTITY.value,
            _group((e.key, e) for e in batch.entities),
            extraction_cap=cap,
        )
        relationship = IndexPart.from_contexts(
            IndexPartName.RELATIONSHIP.value,
            _group((r.key, r) for r in batch.relationships),
            extraction_cap=cap,
        )
        sentence_pair = IndexPart.from_contexts(
            IndexPartName.SENTENCE_PAIR.value,
            _group((r.key, r) for r in batch.sentence_pairs),
            extraction_cap=cap,
        )

        documents = sorted(corpus, key=lambda document: document.doc_id)
        document = IndexPart(
            IndexPartName.DOCUMENT.value,
            [
                build_meta_document(item.doc_id, [tokenize(item.text)])
                for item in tqdm(documents, desc="documents",
                                 disable=not self.progress)
            ],
        )
        doc_entities = {
            item.doc_id: tuple(m.entity_id for m in item.mentions)
            for item in documents
        }

        index = ERIndex(entity, relationship, sentence_pair, document,
                        doc_entities)
        logger.info(
            f"Built index: {entity.doc_count} entities, "
            f"{relationship.doc_count} pairs, {document.doc_count} documents"
        )
        return index


def _group(items) -> Dict[str, List[Tuple[str, ...]]]:
    ordered = sorted(
        items, key=lambda item: (item[1].doc_id, item[1].sentence_index)
    )
    grouped: Dict[str, List[Tuple[str, ...]]] = {}
    for key, extraction in ordered:
        grouped.setdefault(key, []).append(extraction.context_terms)
    return grouped


def build_index(corpus: Corpus, workers: int = 1,
                extraction_cap: Optional[int] = None,
                progress: bool = False) -> ERIndex:
    return IndexBuilder(
        workers=workers, extraction_cap=extraction_cap, progress=progress
    ).build(corpus)
