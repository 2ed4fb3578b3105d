"""Machine translation evaluation toolkit.

Automatic scoring (BLEU), human grammar-accuracy scoring over nine fixed
judgment categories, parallel-corpus preparation, an annotation service,
and comparison reporting between the two kinds of score.
"""

from .bleu import (
    BleuConfig,
    BleuResult,
    NGramMultiset,
    Ratio,
    SegmentPair,
    brevity_penalty,
    clipped_matches,
    corpus_bleu,
    effective_reference_length,
    modified_precision,
    ngram_multiset,
    segments_from_lines,
    sentence_bleu,
)
from .corpus import ParallelCorpus, SplitSpec, load_parallel, sample_eval_set, split
from .errors import (
    ConfigurationError,
    DataError,
    MTEvalError,
    NotFoundError,
    PrecisionUndefined,
    ValidationError,
)
from .gae import (
    CATEGORIES,
    GaeAnnotation,
    GaeCategory,
    GaeScoreTable,
    GaeSession,
    SessionItem,
    category_score,
    model_score,
    pooled_scores,
    pooled_tables,
    sentence_score,
)
from .report import (
    ComparisonReport,
    EpochEntry,
    EpochScoreSeries,
    SentenceComparison,
    best_epoch,
    build_report,
    find_discrepancies,
    render_report,
)
from .tokenizers import TokenizedSentence, tokenize

__version__ = "0.1.0"

__all__ = [
    "BleuConfig",
    "BleuResult",
    "CATEGORIES",
    "ComparisonReport",
    "ConfigurationError",
    "DataError",
    "EpochEntry",
    "EpochScoreSeries",
    "GaeAnnotation",
    "GaeCategory",
    "GaeScoreTable",
    "GaeSession",
    "MTEvalError",
    "NGramMultiset",
    "NotFoundError",
    "ParallelCorpus",
    "PrecisionUndefined",
    "Ratio",
    "SegmentPair",
    "SentenceComparison",
    "SessionItem",
    "SplitSpec",
    "TokenizedSentence",
    "ValidationError",
    "best_epoch",
    "brevity_penalty",
    "build_report",
    "category_score",
    "clipped_matches",
    "corpus_bleu",
    "effective_reference_length",
    "find_discrepancies",
    "load_parallel",
    "model_score",
    "modified_precision",
    "ngram_multiset",
    "pooled_scores",
    "pooled_tables",
    "render_report",
    "sample_eval_set",
    "segments_from_lines",
    "sentence_bleu",
    "sentence_score",
    "split",
    "tokenize",
]
