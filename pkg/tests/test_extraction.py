import tempfile
import unittest
from math import comb
from pathlib import Path

from ersearch.classes.corpus import segment_sentences
from ersearch.classes.extraction import (
    Extractor, extract_document, extract_entity_contexts,
    extract_relationship_contexts, write_extractions
)
from tests.fixtures import TextBuilder, random_corpus


def sentence_of(*tokens):
    """
    Build one sentence; tokens given as (surface, entity_id) are mentions.
    """
    builder = TextBuilder("doc")
    for token in tokens:
        if isinstance(token, tuple):
            builder.add(*token)
        else:
            builder.add(token)
    return segment_sentences(builder.build())


class TestExtraction(unittest.TestCase):
    """
    Entity and relationship context extraction
    """
    def test_entity_and_separating_contexts(self):
        """
        Both entities get the full sentence; the pair gets the words
        between the mentions
        """
        sentences = sentence_of(
            ("Irina", "Irina_Shayik"), "dated", ("Cristiano", "Ronaldo"),
            "in", "Madrid",
        )
        entities = extract_entity_contexts(sentences)
        pairs = extract_relationship_contexts(sentences)

        self.assertEqual([e.entity_id for e in entities],
                         ["Irina_Shayik", "Ronaldo"])
        for extraction in entities:
            self.assertEqual(extraction.context_terms,
                             ("irina", "dated", "cristiano", "in", "madrid"))
        self.assertEqual(len(pairs), 1)
        self.assertEqual(pairs[0].pair, ("Irina_Shayik", "Ronaldo"))
        self.assertEqual(pairs[0].key, "Irina_Shayik|Ronaldo")
        self.assertEqual(pairs[0].context_terms, ("dated",))

    def test_three_entities(self):
        """
        Three distinct entities give three pairs
        """
        sentences = sentence_of(("a", "A"), "x", ("b", "B"), "y", ("c", "C"))
        pairs = extract_relationship_contexts(sentences)
        self.assertEqual([p.key for p in pairs], ["A|B", "A|C", "B|C"])
        self.assertEqual(pairs[1].context_terms, ("x", "b", "y"))

    def test_adjacent_mentions(self):
        """
        Adjacent mentions keep the pair with an empty context
        """
        sentences = sentence_of(("a", "A"), ("b", "B"), "z")
        pairs = extract_relationship_contexts(sentences)
        self.assertEqual(pairs[0].context_terms, ())

    def test_repeated_entity(self):
        """
        A repeated entity yields one entity context and uses its first
        mention for the separating string
        """
        sentences = sentence_of(("a", "A"), "p", ("b", "B"), "q", ("a", "A"))
        self.assertEqual(len(extract_entity_contexts(sentences)), 2)
        pairs = extract_relationship_contexts(sentences)
        self.assertEqual(len(pairs), 1)
        self.assertEqual(pairs[0].context_terms, ("p",))

    def test_sentence_pair_contexts(self):
        """
        Sentence-pair extractions hold the whole sentence
        """
        sentences = sentence_of(("a", "A"), "p", ("b", "B"), "q")
        pairs = extract_relationship_contexts(sentences, full_sentence=True)
        self.assertEqual(pairs[0].context_terms, ("a", "p", "b", "q"))

    def test_pair_count_oracle(self):
        """
        Every sentence with k distinct entities yields k choose 2 pairs
        """
        corpus = random_corpus(seed=5, documents=100, max_sentences=1)
        for document in corpus:
            sentences = segment_sentences(document)
            expected = sum(
                comb(len({m.entity_id for m in s.mention_refs}), 2)
                for s in sentences
            )
            batch = extract_document(document)
            self.assertEqual(len(batch.relationships), expected)
            self.assertEqual(len(batch.sentence_pairs), expected)

    def test_worker_count_does_not_matter(self):
        """
        Parallel extraction merges to the same batch as a serial run
        """
        corpus = random_corpus(seed=8, documents=60)
        self.assertEqual(Extractor(workers=1).extract(corpus),
                         Extractor(workers=2).extract(corpus))

    def test_dump(self):
        """
        The dump holds one line per extraction
        """
        corpus = random_corpus(seed=2, documents=10)
        batch = Extractor().extract(corpus)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "dump.jsonl"
            write_extractions(batch, path)
            lines = path.read_text(encoding="utf-8").splitlines()
        self.assertEqual(
            len(lines),
            len(batch.entities) + len(batch.relationships)
            + len(batch.sentence_pairs),
        )


if __name__ == '__main__':
    unittest.main()
