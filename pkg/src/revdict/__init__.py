"""revdict: reverse dictionary by graph search over definition-derived maps.

Build an index from forward dictionaries (TSV ``headword<TAB>definition``),
then rank the whole lexicon against a descriptive phrase: words appearing in
few, short definition chains away from the phrase's content words score
highest.
"""

__version__ = "0.1.0"

from .graph import (
    UNREACHED,
    GraphStats,
    MatrixKind,
    ReachabilityTrace,
    SparseBinaryMatrix,
    build_blm,
    build_flm,
    build_mblm,
    compute_stats,
    evolve,
    max_nonredundant_depth,
)
from .ingest import (
    BackLinkedList,
    ForwardLinkedList,
    Lexicon,
    RawDictionary,
    build_back_list,
    build_forward_list,
    load_dictionary,
    register_mwe,
)
from .similarity import NoContentWordsError, QueryPlan, RankedOutput, plan_query, query, score
from .store import IndexBundle, load, save
from .textproc import (
    LemmaRules,
    StopwordList,
    default_rules,
    default_stopwords,
    extract_content_lemmas,
    lemmatize,
    tokenize,
)

__all__ = [
    "__version__",
    "UNREACHED",
    "GraphStats",
    "MatrixKind",
    "ReachabilityTrace",
    "SparseBinaryMatrix",
    "build_blm",
    "build_flm",
    "build_mblm",
    "compute_stats",
    "evolve",
    "max_nonredundant_depth",
    "BackLinkedList",
    "ForwardLinkedList",
    "Lexicon",
    "RawDictionary",
    "build_back_list",
    "build_forward_list",
    "load_dictionary",
    "register_mwe",
    "NoContentWordsError",
    "QueryPlan",
    "RankedOutput",
    "plan_query",
    "query",
    "score",
    "IndexBundle",
    "load",
    "save",
    "LemmaRules",
    "StopwordList",
    "default_rules",
    "default_stopwords",
    "extract_content_lemmas",
    "lemmatize",
    "tokenize",
]
