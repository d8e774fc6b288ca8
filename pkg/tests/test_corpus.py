import json
import tempfile
import unittest
from pathlib import Path

from ersearch.classes.corpus import (
    load_corpus, parse_document, segment_sentences, sentence_bounds,
    write_corpus
)
from ersearch.exceptions import (
    DuplicateDocumentError, MalformedRecordError, MentionSpanError,
    MissingCorpusError, OverlappingMentionError
)
from ersearch.util import tokenize
from tests.fixtures import random_corpus


def mention(entity_id, text, surface, occurrence=0):
    start = -1
    for _ in range(occurrence + 1):
        start = text.index(surface, start + 1)
    return {"entity_id": entity_id, "start": start,
            "end": start + len(surface), "surface": surface}


class TestCorpusReader(unittest.TestCase):
    """
    Loading and validation of JSON Lines corpora
    """
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "corpus.jsonl"

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, *records, raw=None):
        lines = [json.dumps(record) for record in records]
        if raw is not None:
            lines.append(raw)
        self.path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def test_two_documents_in_file_order(self):
        """
        Both documents load with their mentions in input order
        """
        text = "Ronaldo dated Irina Shayik."
        self.write(
            {"doc_id": "d2", "text": text, "mentions": [
                mention("Irina_Shayik", text, "Irina Shayik"),
                mention("Cristiano_Ronaldo", text, "Ronaldo"),
            ]},
            {"doc_id": "d1", "text": "No entities here.", "mentions": []},
        )
        corpus = load_corpus(self.path)

        self.assertEqual([d.doc_id for d in corpus], ["d2", "d1"])
        self.assertEqual(
            [m.entity_id for m in corpus.documents[0].mentions],
            ["Irina_Shayik", "Cristiano_Ronaldo"],
        )
        self.assertEqual(corpus.get("d1").mentions, ())

        sentence = segment_sentences(corpus.documents[0])[0]
        self.assertEqual([m.entity_id for m in sentence.mention_refs],
                         ["Cristiano_Ronaldo", "Irina_Shayik"])
        self.assertEqual(sentence.mention_spans, ((0, 1), (2, 4)))

    def test_out_of_bounds_mention(self):
        """
        A mention ending past the text names the document and the offset
        """
        self.write({"doc_id": "bad", "text": "short", "mentions": [
            {"entity_id": "E", "start": 2, "end": 40, "surface": "ort"},
        ]})
        with self.assertRaises(MentionSpanError) as context:
            load_corpus(self.path)
        self.assertIn("bad", str(context.exception))
        self.assertIn("40", str(context.exception))

    def test_surface_mismatch(self):
        """
        The surface must equal the text under its span
        """
        self.write({"doc_id": "d", "text": "Alpha beta", "mentions": [
            {"entity_id": "E", "start": 0, "end": 5, "surface": "Gamma"},
        ]})
        with self.assertRaises(MentionSpanError):
            load_corpus(self.path)

    def test_overlapping_mentions(self):
        """
        Overlapping spans are rejected
        """
        text = "New York City"
        self.write({"doc_id": "d", "text": text, "mentions": [
            mention("New_York", text, "New York"),
            mention("York_City", text, "York City"),
        ]})
        with self.assertRaises(OverlappingMentionError):
            load_corpus(self.path)

    def test_empty_file(self):
        """
        An empty corpus file gives an empty corpus
        """
        self.path.write_text("", encoding="utf-8")
        self.assertEqual(len(load_corpus(self.path)), 0)

    def test_missing_file(self):
        """
        A missing file raises MissingCorpusError
        """
        with self.assertRaises(MissingCorpusError):
            load_corpus(Path(self.tmp.name) / "absent.jsonl")

    def test_malformed_line_number(self):
        """
        Malformed records report the offending line
        """
        self.write({"doc_id": "ok", "text": "fine"}, raw="{not json")
        with self.assertRaises(MalformedRecordError) as context:
            load_corpus(self.path)
        self.assertIn(":2", str(context.exception))

    def test_duplicate_doc_id(self):
        """
        The second definition of a doc_id points back to the first
        """
        self.write({"doc_id": "x", "text": "a"}, {"doc_id": "x", "text": "b"})
        with self.assertRaises(DuplicateDocumentError) as context:
            load_corpus(self.path)
        self.assertIn("line 1", str(context.exception))

    def test_entity_id_separator(self):
        """
        Entity ids may not contain the key separator
        """
        with self.assertRaises(MalformedRecordError):
            parse_document({"doc_id": "d", "text": "ab", "mentions": [
                {"entity_id": "A|B", "start": 0, "end": 2, "surface": "ab"},
            ]})

    def test_write_and_reload(self):
        """
        A written corpus reloads to the same documents
        """
        corpus = random_corpus(seed=3, documents=25)
        write_corpus(corpus, self.path)
        self.assertEqual(load_corpus(self.path), corpus)

        for line, document in zip(
                self.path.read_text(encoding="utf-8").splitlines(), corpus):
            self.assertEqual(json.loads(line), document.as_dict())

    def test_rewrite_is_byte_identical(self):
        """
        Mentions listed out of offset order survive a rewrite unchanged
        """
        text = "Ronaldo dated Irina Shayik."
        record = {"doc_id": "d2", "mentions": [
            mention("Irina_Shayik", text, "Irina Shayik"),
            mention("Cristiano_Ronaldo", text, "Ronaldo"),
        ], "text": text}
        original = json.dumps(record, sort_keys=True) + "\n"
        self.path.write_text(original, encoding="utf-8")

        rewritten = Path(self.tmp.name) / "rewritten.jsonl"
        write_corpus(load_corpus(self.path), rewritten)
        self.assertEqual(rewritten.read_text(encoding="utf-8"), original)


class TestSegmentation(unittest.TestCase):
    """
    Sentence splitting and mention assignment
    """
    def test_two_sentences(self):
        """
        A period followed by an upper-case word ends a sentence
        """
        text = "Alpha met Beta. Gamma left."
        document = parse_document({"doc_id": "d", "text": text, "mentions": [
            mention("A", text, "Alpha"),
            mention("B", text, "Beta"),
            mention("C", text, "Gamma"),
        ]})
        sentences = segment_sentences(document)

        self.assertEqual(len(sentences), 2)
        self.assertEqual(sentences[0].tokens, ("alpha", "met", "beta"))
        self.assertEqual([m.entity_id for m in sentences[0].mention_refs],
                         ["A", "B"])
        self.assertEqual(sentences[0].mention_spans, ((0, 1), (2, 3)))
        self.assertEqual([m.entity_id for m in sentences[1].mention_refs],
                         ["C"])

    def test_lower_case_after_period(self):
        """
        Abbreviations followed by a lower-case word do not split
        """
        self.assertEqual(len(sentence_bounds("It cost approx. ten euro.")), 1)

    def test_no_terminator(self):
        """
        Text without punctuation is a single sentence
        """
        self.assertEqual(sentence_bounds("just words here"), [(0, 15)])

    def test_mention_assignment_oracle(self):
        """
        Every mention lands in the last sentence starting at or before it,
        and sentence tokens reproduce the document tokens
        """
        corpus = random_corpus(seed=11, documents=1000)
        for document in corpus:
            sentences = segment_sentences(document)
            self.assertEqual(
                [t for s in sentences for t in s.tokens],
                tokenize(document.text),
            )

            expected = {}
            for item in document.mentions:
                owner = 0
                for sentence in sentences:
                    if sentence.start <= item.start:
                        owner = sentence.index
                expected[(item.start, item.end)] = owner

            actual = {
                (item.start, item.end): sentence.index
                for sentence in sentences for item in sentence.mention_refs
            }
            self.assertEqual(actual, expected, document.doc_id)


if __name__ == '__main__':
    unittest.main()
