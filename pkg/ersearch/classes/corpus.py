import json
import logging
import re
from bisect import bisect_right
from pathlib import Path
from typing import Dict, Iterable, List, Tuple, Union

from ersearch.const import KEY_SEPARATOR
from ersearch.exceptions import general as exc
from ersearch.types import AnnotatedDocument, Corpus, Mention, Sentence
from ersearch.util import token_spans

logger = logging.getLogger(__name__)

TERMINATOR = re.compile(r"[.!?]")
WHITESPACE = re.compile(r"\s+")


class CorpusReader:
    """
    Load and validate a JSON Lines corpus of annotated documents.
    """

    def __init__(self, path: Union[str, Path]):
        """
        Initialize the CorpusReader.

        Parameters
        ----------
        path : str or Path
            Corpus file, one document record per line, UTF-8.
        """
        self.path = Path(path)

    def read(self) -> Corpus:
        """
        Parse every record of the file.

        Returns
        -------
        Corpus
            Documents in file order. Blank lines are ignored, so an empty
            file yields an empty corpus.
        """
        if not self.path.is_file():
            raise exc.MissingCorpusError(data=str(self.path))

        documents: List[AnnotatedDocument] = []
        seen: Dict[str, int] = {}

        with self.path.open(encoding="utf-8") as stream:
            for line_number, line in enumerate(stream, start=1):
                if not line.strip():
                    continue

                location = f"{self.path}:{line_number}"
                document = self.parse_line(line, location)

                if document.doc_id in seen:
                    raise exc.DuplicateDocumentError(
                        data=f"{location}: doc_id {document.doc_id!r} "
                        f"already defined on line {seen[document.doc_id]}"
                    )

                seen[document.doc_id] = line_number
                documents.append(document)

        logger.info(f"Loaded {len(documents)} documents from {self.path}")
        return Corpus(documents=tuple(documents))

    def parse_line(self, line: str, location: str) -> AnnotatedDocument:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as error:
            raise exc.MalformedRecordError(data=f"{location}: {error.msg}")

        return parse_document(record, location)


def parse_document(record, location: str = "<record>") -> AnnotatedDocument:
    """
    Validate one document record and build an AnnotatedDocument.

    Mentions keep their input order; overlaps are checked by offset.
    """
    if not isinstance(record, dict):
        raise exc.MalformedRecordError(data=f"{location}: expected an object")

    doc_id = record.get("doc_id")
    text = record.get("text")
    raw_mentions = record.get("mentions", [])

    if not isinstance(doc_id, str) or not doc_id:
        raise exc.MalformedRecordError(
            data=f"{location}: doc_id must be a non-empty string"
        )
    if not isinstance(text, str):
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: text must be a string"
        )
    if not isinstance(raw_mentions, list):
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: mentions must be a list"
        )

    mentions = [
        _parse_mention(raw, doc_id, text, location) for raw in raw_mentions
    ]
    by_offset = sorted(
        mentions, key=lambda mention: (mention.start, mention.end)
    )

    for previous, current in zip(by_offset, by_offset[1:]):
        if current.start < previous.end:
            raise exc.OverlappingMentionError(
                data=f"{location}: doc {doc_id}: mention "
                f"{current.entity_id}@{current.start} overlaps "
                f"{previous.entity_id}@{previous.start}-{previous.end}"
            )

    return AnnotatedDocument(doc_id=doc_id, text=text, mentions=tuple(mentions))


def _is_offset(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _parse_mention(raw, doc_id: str, text: str, location: str) -> Mention:
    if not isinstance(raw, dict):
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: mention must be an object"
        )

    entity_id = raw.get("entity_id")
    start, end = raw.get("start"), raw.get("end")
    surface = raw.get("surface")

    if not isinstance(entity_id, str) or not entity_id.strip():
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: entity_id must be non-empty"
        )
    if KEY_SEPARATOR in entity_id or any(ch.isspace() for ch in entity_id):
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: entity_id {entity_id!r} "
            f"contains whitespace or {KEY_SEPARATOR!r}"
        )
    if not _is_offset(start) or not _is_offset(end):
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: offsets must be integers"
        )
    if not isinstance(surface, str):
        raise exc.MalformedRecordError(
            data=f"{location}: doc {doc_id}: surface must be a string"
        )
    if start < 0 or start >= end:
        raise exc.MentionSpanError(
            data=f"{location}: doc {doc_id}: empty or negative span "
            f"at offset {start}"
        )
    if end > len(text):
        raise exc.MentionSpanError(
            data=f"{location}: doc {doc_id}: offset {end} exceeds "
            f"text length {len(text)}"
        )
    if text[start:end] != surface:
        raise exc.MentionSpanError(
            data=f"{location}: doc {doc_id}: surface {surface!r} does not "
            f"match text at offset {start}"
        )

    return Mention(entity_id=entity_id, start=start, end=end, surface=surface)


def load_corpus(path: Union[str, Path]) -> Corpus:
    return CorpusReader(path).read()


def write_corpus(corpus: Iterable[AnnotatedDocument], path: Union[str, Path]):
    """
    Write documents as JSON Lines with sorted keys.
    """
    with Path(path).open("w", encoding="utf-8") as stream:
        for document in corpus:
            stream.write(
                json.dumps(document.as_dict(), sort_keys=True,
                           ensure_ascii=False)
            )
            stream.write("\n")


def sentence_bounds(text: str) -> List[Tuple[int, int]]:
    """
    Character spans of the sentences of a text.

    A sentence ends after '.', '!' or '?' when the next non-space character
    is upper case or the text ends. Leading whitespace is not part of a
    sentence; text without any token still yields one sentence.
    """
    cuts = []
    for match in TERMINATOR.finditer(text):
        end = match.end()
        space = WHITESPACE.match(text, end)
        if space is None:
            if end == len(text):
                cuts.append(end)
            continue
        following = space.end()
        if following == len(text) or text[following].isupper():
            cuts.append(end)

    bounds = []
    previous = 0
    for cut in cuts + [len(text)]:
        space = WHITESPACE.match(text, previous)
        start = space.end() if space else previous
        if start < cut:
            bounds.append((start, cut))
        previous = cut

    if not bounds:
        space = WHITESPACE.match(text)
        start = min(space.end() if space else 0, len(text))
        bounds.append((start, len(text)))

    return bounds


def segment_sentences(document: AnnotatedDocument) -> List[Sentence]:
    """
    Split a document into tokenized sentences and assign its mentions.

    Each mention belongs to the sentence containing its start offset (the
    last sentence starting at or before it). Its token span covers the
    sentence tokens overlapping the mention.
    """
    bounds = sentence_bounds(document.text)
    starts = [start for start, _ in bounds]

    assigned: List[List[Mention]] = [[] for _ in bounds]
    for mention in sorted(document.mentions,
                          key=lambda mention: (mention.start, mention.end)):
        position = max(bisect_right(starts, mention.start) - 1, 0)
        assigned[position].append(mention)

    sentences = []
    for index, (start, end) in enumerate(bounds):
        spans = token_spans(document.text[start:end], offset=start)
        tokens = tuple(token for token, _, _ in spans)
        sentences.append(Sentence(
            doc_id=document.doc_id,
            index=index,
            start=start,
            end=end,
            tokens=tokens,
            mention_refs=tuple(assigned[index]),
            mention_spans=tuple(
                _mention_tokens(mention, spans) for mention in assigned[index]
            ),
        ))

    return sentences


def _mention_tokens(mention: Mention, spans) -> Tuple[int, int]:
    first = None
    last = None
    before = 0
    for position, (_, token_start, token_end) in enumerate(spans):
        if token_end <= mention.start:
            before = position + 1
        elif token_start < mention.end:
            if first is None:
                first = position
            last = position

    if first is None:
        return before, before
    return first, last + 1
