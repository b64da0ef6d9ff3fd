"""Trainable source-code language identification.

Derives a cross-language grammar of informative token n-grams from a
labeled corpus, trains a regularized maximum-entropy classifier over
those productions, and classifies arbitrary source text with
per-language probabilities.
"""

from .corpus import CorpusManifest, SampleRecord, ingest, read_manifest, split, write_manifest
from .evaluation import EvalReport, evaluate, parse_report, render_report
from .grammar import (
    Grammar,
    Production,
    ProductionStats,
    accumulate_stats,
    extract_candidates,
    extract_features,
    mutual_information,
    production_matches_at,
    select_grammar,
)
from .maxent import (
    MaxentModel,
    Prediction,
    TrainConfig,
    TrainingSet,
    TrainResult,
    gradient,
    log_likelihood,
    make_training_set,
    penalized_log_likelihood,
    predict,
    train,
)
from .modelfile import load_model, save_model
from .pipeline import (
    ClassifyResult,
    LanguageModel,
    PipelineSettings,
    classify_text,
    train_from_manifest,
)
from .preprocess import (
    CommentRules,
    Token,
    TokenKind,
    default_comment_syntax,
    load_comment_syntax,
    parse_rendered,
    preprocess_text,
    render_stream,
    strip_comments,
)
from .vocabulary import (
    KeywordTable,
    WordFrequencyTable,
    build_keyword_table,
    count_frequencies,
    lexicalize,
)

__version__ = "0.1.0"

__all__ = [
    "ClassifyResult",
    "CommentRules",
    "CorpusManifest",
    "EvalReport",
    "Grammar",
    "KeywordTable",
    "LanguageModel",
    "MaxentModel",
    "PipelineSettings",
    "Prediction",
    "Production",
    "ProductionStats",
    "SampleRecord",
    "Token",
    "TokenKind",
    "TrainConfig",
    "TrainResult",
    "TrainingSet",
    "WordFrequencyTable",
    "accumulate_stats",
    "build_keyword_table",
    "classify_text",
    "count_frequencies",
    "default_comment_syntax",
    "evaluate",
    "extract_candidates",
    "extract_features",
    "gradient",
    "ingest",
    "lexicalize",
    "load_comment_syntax",
    "load_model",
    "log_likelihood",
    "make_training_set",
    "mutual_information",
    "parse_rendered",
    "parse_report",
    "penalized_log_likelihood",
    "predict",
    "preprocess_text",
    "production_matches_at",
    "read_manifest",
    "render_report",
    "render_stream",
    "save_model",
    "select_grammar",
    "split",
    "strip_comments",
    "train",
    "train_from_manifest",
    "write_manifest",
    "__version__",
]
