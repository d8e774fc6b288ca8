import json
import logging
from itertools import combinations
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

from tqdm import tqdm

from ersearch.classes.corpus import segment_sentences
from ersearch.types import (
    AnnotatedDocument, EntityExtraction, ExtractionBatch,
    RelationshipExtraction, Sentence
)

logger = logging.getLogger(__name__)


def _first_mentions(sentence: Sentence) -> Dict[str, Tuple[int, int]]:
    """
    Token span of the first mention of every entity, in mention order.
    """
    first: Dict[str, Tuple[int, int]] = {}
    for mention, span in zip(sentence.mention_refs, sentence.mention_spans):
        first.setdefault(mention.entity_id, span)
    return first


def extract_entity_contexts(
    sentences: Iterable[Sentence]
) -> List[EntityExtraction]:
    """
    One extraction per distinct entity of a sentence, holding the full
    sentence tokens.
    """
    extractions = []
    for sentence in sentences:
        for entity_id in _first_mentions(sentence):
            extractions.append(EntityExtraction(
                entity_id=entity_id,
                doc_id=sentence.doc_id,
                sentence_index=sentence.index,
                context_terms=sentence.tokens,
            ))
    return extractions


def extract_relationship_contexts(
    sentences: Iterable[Sentence], full_sentence: bool = False
) -> List[RelationshipExtraction]:
    """
    One extraction per unordered pair of distinct co-occurring entities.

    Parameters
    ----------
    sentences : iterable of Sentence
        Segmented sentences.
    full_sentence : bool, optional
        Use the whole sentence as context instead of the separating string
        between the first mentions of the two entities.

    Returns
    -------
    list of RelationshipExtraction
        Pairs in lexicographic order, per sentence; empty separating
        strings are kept.
    """
    extractions = []
    for sentence in sentences:
        first = _first_mentions(sentence)
        for left, right in combinations(sorted(first), 2):
            if full_sentence:
                context = sentence.tokens
            else:
                context = _separating_terms(sentence, first[left], first[right])
            extractions.append(RelationshipExtraction(
                pair=(left, right),
                doc_id=sentence.doc_id,
                sentence_index=sentence.index,
                context_terms=context,
            ))
    return extractions


def _separating_terms(sentence, span_a, span_b) -> Tuple[str, ...]:
    before, after = sorted((span_a, span_b))
    if before[1] >= after[0]:
        return ()
    return sentence.tokens[before[1]:after[0]]


def extract_document(document: AnnotatedDocument) -> ExtractionBatch:
    """
    Segment one document and extract all of its contexts.
    """
    sentences = segment_sentences(document)
    return ExtractionBatch(
        entities=tuple(extract_entity_contexts(sentences)),
        relationships=tuple(extract_relationship_contexts(sentences)),
        sentence_pairs=tuple(
            extract_relationship_contexts(sentences, full_sentence=True)
        ),
    )


class Extractor:
    """
    Run extraction over a whole corpus, optionally with a process pool.
    """

    def __init__(self, workers: int = 1, progress: bool = False):
        self.workers = max(1, workers)
        self.progress = progress

    def extract(self, documents: Iterable[AnnotatedDocument]) -> ExtractionBatch:
        """
        Extract every document and merge the results by doc_id.

        The merged batch does not depend on the number of workers.
        """
        documents = sorted(documents, key=lambda document: document.doc_id)

        if self.workers > 1 and len(documents) > 1:
            with Pool(processes=self.workers) as pool:
                batches = list(tqdm(
                    pool.imap(extract_document, documents, chunksize=16),
                    total=len(documents),
                    desc="extracting",
                    disable=not self.progress,
                ))
        else:
            batches = [
                extract_document(document)
                for document in tqdm(
                    documents, desc="extracting", disable=not self.progress
                )
            ]

        merged = ExtractionBatch(
            entities=tuple(e for batch in batches for e in batch.entities),
            relationships=tuple(
                r for batch in batches for r in batch.relationships
            ),
            sentence_pairs=tuple(
                r for batch in batches for r in batch.sentence_pairs
            ),
        )

        # pylint: disable=W1203
        logger.info(
            f"Extracted {len(merged.entities)} entity and "
            f"{len(merged.relationships)} relationship contexts "
            f"from {len(documents)} documents"
        )
        return merged


def write_extractions(batch: ExtractionBatch, path: Union[str, Path]):
    """
    Dump extractions as JSON Lines, one record per extraction.
    """
    groups = (
        ("entity", batch.entities),
        ("relationship", batch.relationships),
        ("sentence_pair", batch.sentence_pairs),
    )
    with Path(path).open("w", encoding="utf-8") as stream:
        for kind, extractions in groups:
            for extraction in extractions:
                record = {"type": kind, **extraction.as_dict()}
                stream.write(
                    json.dumps(record, sort_keys=True, ensure_ascii=False)
                )
                stream.write("\n")
