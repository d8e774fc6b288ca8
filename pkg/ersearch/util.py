import re
from typing import Iterable, List, Sequence, Set, Tuple

from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

from ersearch.const import KEY_SEPARATOR

TOKEN_PATTERN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> List[str]:
    """
    Lowercase the text and split it on non-alphanumeric characters.

    No stemming or stopword removal is applied, so query terms and index
    terms share exactly one vocabulary.
    """
    return [match.group().lower() for match in TOKEN_PATTERN.finditer(text)]


def token_spans(text: str, offset: int = 0) -> List[Tuple[str, int, int]]:
    """
    Tokenize and keep the character span of every token.

    Spans are taken on the original text, so offsets stay valid even when
    lowercasing changes the length of a character.
    """
    return [
        (match.group().lower(), match.start() + offset, match.end() + offset)
        for match in TOKEN_PATTERN.finditer(text)
    ]


def canonical_pair(first: str, second: str) -> Tuple[str, str]:
    """
    Order an entity pair lexicographically.
    """
    if first <= second:
        return first, second
    return second, first


def pair_key(first: str, second: str) -> str:
    """
    The string key of the unordered pair {first, second}.
    """
    return KEY_SEPARATOR.join(canonical_pair(first, second))


def split_key(key: str) -> Tuple[str, ...]:
    return tuple(key.split(KEY_SEPARATOR))


def tuple_key(entities: Sequence[str]) -> str:
    """
    Join entity ids in sub-query order.
    """
    return KEY_SEPARATOR.join(entities)


def canonical_tuple_key(entities: Sequence[str]) -> str:
    """
    Key of an entity chain up to reversal.

    Relationships are symmetric, so <A, B, C> and <C, B, A> describe the
    same chain; for pairs this is plain lexicographic ordering.
    """
    forward = tuple(entities)
    backward = tuple(reversed(forward))
    return tuple_key(min(forward, backward))


def canonicalize_key(key: str) -> str:
    return canonical_tuple_key(split_key(key))


def title_tokens(title: str) -> Set[str]:
    """
    Lowercase whitespace tokens of a title with English stopwords removed.
    """
    return {
        token for token in title.lower().split()
        if token not in ENGLISH_STOP_WORDS
    }


def jaccard(first: Iterable[str], second: Iterable[str]) -> float:
    first, second = set(first), set(second)
    union = first | second
    if not union:
        return 0.0
    return len(first & second) / len(union)
