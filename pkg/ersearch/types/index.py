from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ersearch.types.common import Common


@dataclass(frozen=True)
class MetaDocument(Common):
    """
    Fused representation of one entity or one entity pair.
    """
    key: str
    contexts: Tuple[Tuple[str, ...], ...]
    term_freqs: Dict[str, int]
    length: int


@dataclass(frozen=True)
class CollectionStats(Common):
    """
    Collection-level statistics of one index part.
    """
    name: str
    total_terms: int
    doc_count: int
    avg_length: float
    mu: float
    vocabulary_size: int
    context_count: int
    extraction_cap: Optional[int] = None


@dataclass(frozen=True)
class TermStats(Common):
    """
    Everything a feature function needs about one term (or term pair)
    in one meta-document.
    """
    tf: int
    cf: int
    df: int
    length: int
    total_terms: int
    doc_count: int
    avg_length: float
    mu: float
