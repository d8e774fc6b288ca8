import json
import random
import tempfile
import unittest
from collections import Counter
from pathlib import Path

from ersearch.classes.corpus import segment_sentences
from ersearch.classes.index import (
    ERIndex, IndexPart, build_index, build_meta_document
)
from ersearch.exceptions import (
    ConfigError, IndexFormatError, IndexNotFoundError, UnknownKeyError
)
from ersearch.types import Corpus
from tests.fixtures import (
    VOCABULARY, TextBuilder, random_corpus, toy_corpus
)


def single_part(*contexts):
    return IndexPart("entity", [build_meta_document("k", contexts)])


def naive_ordered(contexts, first, second):
    return sum(
        1 for context in contexts
        for left, right in zip(context, context[1:])
        if left == first and right == second
    )


def naive_window(contexts, first, second, window):
    count = 0
    for context in contexts:
        waiting = {first: [], second: []}
        for position, term in enumerate(context):
            if term not in waiting:
                continue
            other = second if term == first else first
            waiting[other] = [
                p for p in waiting[other] if position - p <= window - 1
            ]
            if waiting[other]:
                waiting[other].pop(0)
                count += 1
            else:
                waiting[term].append(position)
    return count


class TestIndexPart(unittest.TestCase):
    """
    Term, phrase and window statistics of one index part
    """
    def test_ordered_bigram(self):
        """
        Phrase counts follow term order
        """
        self.assertEqual(
            single_part(["a", "b", "a", "b"]).ordered_bigram_stats(
                "k", "a", "b").tf, 2)
        self.assertEqual(
            single_part(["a", "b"]).ordered_bigram_stats("k", "b", "a").tf, 0)

    def test_unordered_window(self):
        """
        Window counts ignore order and respect the window size
        """
        self.assertEqual(
            single_part(["x", "a", "y", "b"]).unordered_window_stats(
                "k", "a", "b", 8).tf, 1)
        self.assertEqual(
            single_part(["b", "y", "a"]).unordered_window_stats(
                "k", "a", "b", 8).tf, 1)
        self.assertEqual(
            single_part(["a"] + ["z"] * 8 + ["b"]).unordered_window_stats(
                "k", "a", "b", 8).tf, 0)

    def test_no_match_across_contexts(self):
        """
        Two extractions of one meta-document never form a phrase
        """
        part = single_part(["x", "a"], ["b", "x"])
        self.assertEqual(part.ordered_bigram_stats("k", "a", "b").tf, 0)
        self.assertEqual(part.unordered_window_stats("k", "a", "b", 8).tf, 0)

    def test_small_window_rejected(self):
        """
        Windows below 2 are a configuration error
        """
        with self.assertRaises(ConfigError):
            single_part(["a", "b"]).unordered_window_stats("k", "a", "b", 1)

    def test_unknown_key(self):
        """
        Statistics of a missing key raise UnknownKeyError
        """
        with self.assertRaises(UnknownKeyError):
            single_part(["a"]).unigram_stats("missing", "a")

    def test_mu_defaults_to_average_length(self):
        """
        mu is the average length unless overridden
        """
        part = IndexPart("entity", [
            build_meta_document("a", [["x", "y"]]),
            build_meta_document("b", [["x", "y", "z", "w"]]),
        ])
        self.assertEqual(part.mu, 3.0)
        self.assertEqual(part.with_mu(10).mu, 10)
        self.assertEqual(part.mu, 3.0)
        with self.assertRaises(ConfigError):
            part.with_mu(0)


class TestIndexBuilder(unittest.TestCase):
    """
    Index construction, invariants and persistence
    """
    @classmethod
    def setUpClass(cls):
        """
        Build the toy index and a random one shared by the tests
        """
        cls.toy = build_index(toy_corpus())
        cls.corpus = random_corpus(seed=21, documents=400)
        cls.index = build_index(cls.corpus)

    def test_single_pair(self):
        """
        One sentence with two entities gives two entities and one pair
        """
        document = (TextBuilder("d").add("Alpha", "A").add("met")
                    .add("Beta", "B").build())
        index = build_index(Corpus(documents=(document,)))
        self.assertEqual(index.entity.keys(), ["A", "B"])
        self.assertEqual(index.relationship.keys(), ["A|B"])
        self.assertEqual(index.popularity("A"), 1)
        self.assertEqual(index.popularity("B"), 1)
        self.assertEqual(index.document_pairs("d"), ["A|B"])

    def test_toy_statistics(self):
        """
        The toy collection reproduces its reference statistics
        """
        entity = self.toy.entity
        ronaldo = entity.unigram_stats("Cristiano_Ronaldo", "soccer")
        self.assertEqual(ronaldo.tf, 800)
        self.assertEqual(ronaldo.length, 5000)
        self.assertEqual(
            entity.unigram_stats("Cristiano_Ronaldo", "player").tf, 800)

        messi = entity.unigram_stats("Lionel_Messi", "soccer")
        self.assertEqual((messi.tf, messi.length, messi.cf), (700, 4000, 3000))
        self.assertEqual(entity.total_terms, 100000)
        self.assertEqual(entity.cf["player"], 8000)

        relationship = self.toy.relationship
        self.assertEqual(relationship.total_terms, 20000)
        self.assertEqual(relationship.cf["dated"], 5000)
        self.assertEqual(
            relationship.unigram_stats("Gisele_Bundchen|Tom_Brady",
                                       "dated").length, 800)

    def test_recount_oracle(self):
        """
        Entity term frequencies equal a naive recount over sentences
        """
        expected = {}
        for document in self.corpus:
            for sentence in segment_sentences(document):
                for entity_id in {m.entity_id for m in sentence.mention_refs}:
                    expected.setdefault(entity_id, Counter()).update(
                        sentence.tokens)

        entity = self.index.entity
        self.assertEqual(set(entity.keys()), set(expected))
        for key, counts in expected.items():
            self.assertEqual(entity.meta(key).term_freqs, dict(counts))
        for term in VOCABULARY:
            self.assertEqual(
                entity.cf.get(term, 0),
                sum(d.term_freqs.get(term, 0)
                    for d in entity.documents.values()),
            )

    def test_phrase_and_window_oracle(self):
        """
        Ordered and windowed counts match naive scans, never decrease
        with the window and bound the ordered count from above
        """
        entity = self.index.entity
        rng = random.Random(4)
        pairs = [tuple(rng.sample(VOCABULARY, 2)) for _ in range(12)]

        for key in entity.keys():
            contexts = entity.meta(key).contexts
            for first, second in pairs:
                ordered = entity.ordered_bigram_stats(key, first, second).tf
                self.assertEqual(ordered,
                                 naive_ordered(contexts, first, second))
                previous = ordered
                for window in range(2, 11):
                    count = entity.unordered_window_stats(
                        key, first, second, window).tf
                    self.assertEqual(
                        count, naive_window(contexts, first, second, window))
                    self.assertGreaterEqual(count, previous)
                    previous = count

    def test_popularity_sum(self):
        """
        Popularities add up to twice the number of pairs
        """
        total = sum(self.index.popularity(key)
                    for key in self.index.entity.keys())
        self.assertEqual(total, 2 * self.index.relationship_count)

    def test_input_order_independent(self):
        """
        Shuffling the corpus leaves the index unchanged
        """
        documents = list(self.corpus)
        random.Random(9).shuffle(documents)
        shuffled = build_index(Corpus(documents=tuple(documents)))

        self.assertEqual(shuffled.describe(), self.index.describe())
        for name, part in self.index.parts().items():
            self.assertEqual(shuffled.part(name).documents, part.documents)

    def test_parallel_build(self):
        """
        Building with two workers equals the serial build
        """
        parallel = build_index(self.corpus, workers=2)
        for name, part in self.index.parts().items():
            self.assertEqual(parallel.part(name).documents, part.documents)

    def test_extraction_cap(self):
        """
        A cap limits the contexts fused per key
        """
        capped = build_index(self.corpus, extraction_cap=1)
        for part in (capped.entity, capped.relationship):
            self.assertTrue(all(
                len(d.contexts) <= 1 for d in part.documents.values()))
        self.assertEqual(capped.entity.stats().extraction_cap, 1)

    def test_empty_corpus(self):
        """
        An empty corpus builds an empty index
        """
        index = build_index(Corpus())
        for stats in index.describe().values():
            self.assertEqual(stats["doc_count"], 0)
            self.assertEqual(stats["avg_length"], 0.0)

    def test_save_and_load(self):
        """
        A saved index loads back with identical statistics
        """
        with tempfile.TemporaryDirectory() as tmp:
            self.index.save(tmp)
            loaded = ERIndex.load(tmp)

        self.assertEqual(loaded.describe(), self.index.describe())
        self.assertEqual(loaded.doc_entities, self.index.doc_entities)
        self.assertEqual(loaded.membership, self.index.membership)
        for name, part in self.index.parts().items():
            self.assertEqual(loaded.part(name).documents, part.documents)

    def test_missing_and_foreign_snapshots(self):
        """
        Missing snapshots and other versions are refused
        """
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(IndexNotFoundError):
                ERIndex.load(Path(tmp) / "nowhere")

            self.index.save(tmp)
            manifest = Path(tmp) / "manifest.json"
            data = json.loads(manifest.read_text(encoding="utf-8"))
            data["version"] = 99
            manifest.write_text(json.dumps(data), encoding="utf-8")
            with self.assertRaises(IndexFormatError):
                ERIndex.load(tmp)

    def test_with_mu(self):
        """
        The relationship prior also applies to sentence pairs
        """
        index = self.toy.with_mu(entity=1500, relationship=500)
        self.assertEqual(index.entity.mu, 1500)
        self.assertEqual(index.relationship.mu, 500)
        self.assertEqual(index.sentence_pair.mu, 500)
        self.assertEqual(index.document.mu, self.toy.document.avg_length)


if __name__ == '__main__':
    unittest.main()
