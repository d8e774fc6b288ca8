"""
ersearch enumerations and defaults
"""
from enum import Enum


class SubQueryKind(str, Enum):
    """
    Kinds of sub-queries in an E-R query
    """
    ENTITY = "entity"
    RELATIONSHIP = "relationship"


class ScorerFamily(str, Enum):
    """
    Textual scoring families
    """
    LM = "lm"
    BM25 = "bm25"


class ModelName(str, Enum):
    """
    Ranking models selectable from the command line
    """
    EF = "ef"
    LF = "lf"
    ERDM = "erdm"
    BASE_EE = "base-ee"
    BASE_E = "base-e"
    BASE_R = "base-r"


class Metric(str, Enum):
    """
    Rank metrics reported by the evaluator
    """
    MAP = "map"
    P10 = "p@10"
    MRR = "mrr"
    NDCG20 = "ndcg@20"


class IndexPartName(str, Enum):
    """
    The immutable index parts of an ERIndex
    """
    ENTITY = "entity"
    RELATIONSHIP = "relationship"
    SENTENCE_PAIR = "sentence_pair"
    DOCUMENT = "document"


# ERDM clique-set feature classes, in weight-vector order
FEATURE_NAMES = (
    "e_t", "e_o", "e_u",
    "r_t", "r_o", "r_u",
    "er_s", "rer_s",
)

KEY_SEPARATOR = "|"

# stand-in for log(0) when a term never occurs in the collection
UNSEEN_TERM_SCORE = -1e9

DEFAULT_K = 20000
DEFAULT_TOP_N = 100
DEFAULT_WINDOW = 8
DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
DEFAULT_ALPHA = 0.1
DEFAULT_SDM_WEIGHTS = (0.85, 0.10, 0.05)
DEFAULT_SEED = 42

DEFAULT_RESTARTS = 3
DEFAULT_MAX_SWEEPS = 25
DEFAULT_EPSILON = 1e-4
DEFAULT_FOLDS = 5
DEFAULT_PROBES = 20

MAP_DEPTH = 100
PRECISION_DEPTH = 10
NDCG_DEPTH = 20

KEY_COLUMN_THRESHOLD = 0.8
JACCARD_THRESHOLD = 0.7

INDEX_FORMAT = "ersearch-index"
INDEX_FORMAT_VERSION = 1
ENV_PREFIX = "ERSEARCH_"
DEFAULT_RUN_TAG = "ersearch"
