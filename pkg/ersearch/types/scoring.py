from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ersearch.const import FEATURE_NAMES
from ersearch.types.common import Common
from ersearch.util import canonical_tuple_key, tuple_key


@dataclass(frozen=True)
class FeatureVector(Common):
    """
    The eight clique-set aggregates of one candidate tuple.

    rer_s stays 0.0 for tuples with fewer than two relationships.
    """
    e_t: float = 0.0
    e_o: float = 0.0
    e_u: float = 0.0
    r_t: float = 0.0
    r_o: float = 0.0
    r_u: float = 0.0
    er_s: float = 0.0
    rer_s: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])


@dataclass(frozen=True)
class FeatureWeights(Common):
    """
    The lambda vector of the dependence model, one weight per feature class.
    """
    e_t: float = 0.0
    e_o: float = 0.0
    e_u: float = 0.0
    r_t: float = 0.0
    r_o: float = 0.0
    r_u: float = 0.0
    er_s: float = 0.0
    rer_s: float = 0.0

    def __post_init__(self):
        for name in FEATURE_NAMES:
            if getattr(self, name) < 0:
                raise ValueError(f"weight {name} must be non-negative")

    @classmethod
    def unigram(cls) -> "FeatureWeights":
        """
        Equal entity and relationship unigram weights, every other weight 0.
        Ranks exactly like Early Fusion.
        """
        return cls(e_t=0.5, r_t=0.5)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "FeatureWeights":
        return cls(**{
            name: float(value) for name, value in zip(FEATURE_NAMES, values)
        })

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    def normalized(self) -> "FeatureWeights":
        """
        Rescale onto the probability simplex.
        """
        values = self.as_array()
        total = values.sum()
        if total <= 0:
            raise ValueError("at least one weight must be positive")
        return self.from_array(values / total)

    def score(self, features: FeatureVector) -> float:
        """
        Linear combination, summed in feature order.
        """
        total = 0.0
        for name in FEATURE_NAMES:
            weight = getattr(self, name)
            if weight:
                total += weight * getattr(features, name)
        return total

    def as_lambda(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


@dataclass(frozen=True)
class CandidateTuple(Common):
    """
    A ranked entity tuple.

    entities follow sub-query order; pairs hold the canonical key of the
    pair matched by each relationship sub-query; scores holds one score
    per sub-query in query order.
    """
    entities: Tuple[str, ...]
    pairs: Tuple[str, ...] = ()
    scores: Tuple[float, ...] = ()
    joint_score: float = 0.0
    features: Optional[FeatureVector] = field(default=None, compare=False)

    @property
    def key(self) -> str:
        """
        Canonical key, identical for a chain and its reversal.
        """
        return canonical_tuple_key(self.entities)

    @property
    def ordered_key(self) -> str:
        return tuple_key(self.entities)


@dataclass(frozen=True)
class CandidateLists(Common):
    """
    First-pass ranked (key, score) lists, one per sub-query kind position.
    """
    entities: Tuple[Tuple[Tuple[str, float], ...], ...] = ()
    relationships: Tuple[Tuple[Tuple[str, float], ...], ...] = ()

    def entity_scores(self) -> Tuple[Dict[str, float], ...]:
        return tuple(dict(ranked) for ranked in self.entities)

    def relationship_scores(self) -> Tuple[Dict[str, float], ...]:
        return tuple(dict(ranked) for ranked in self.relationships)
