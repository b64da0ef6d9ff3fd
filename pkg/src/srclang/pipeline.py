"""End-to-end training and classification over a labeled corpus.

Training: induce per-language keyword tables from comment-stripped
streams, lexicalize, harvest n-gram candidates, keep the informative
ones as the grammar, then fit the classifier on production-presence
features extracted from the full (comment-kept) preprocessed streams.
Features are extracted the same way at training and classification
time, on plain preprocessed streams, because the language (and hence
the comment syntax and keyword table) is unknown for an incoming file.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .corpus import (
    DEFAULT_MAX_BYTES,
    DEFAULT_MIN_BYTES,
    CorpusManifest,
)
from .grammar import (
    DEFAULT_MI_THRESHOLD,
    MAX_NGRAM,
    Grammar,
    accumulate_stats,
    extract_candidates,
    extract_features,
    select_grammar,
)
from .maxent import (
    DEFAULT_MAX_ITERS,
    DEFAULT_SIGMA,
    DEFAULT_TOL,
    MaxentModel,
    TrainConfig,
    TrainResult,
    make_training_set,
    predict,
    train,
)
from .preprocess import CommentRules, CommentSyntax, preprocess_text
from .vocabulary import (
    DEFAULT_KEYWORD_THRESHOLD,
    KeywordTable,
    build_keyword_table,
    count_frequencies,
    lexicalize,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineSettings:
    """Every tunable of the pipeline; recorded verbatim in the model file."""

    keyword_threshold: float = DEFAULT_KEYWORD_THRESHOLD
    mi_threshold: float = DEFAULT_MI_THRESHOLD
    sigma: float = DEFAULT_SIGMA
    n_max: int = MAX_NGRAM
    min_bytes: int = DEFAULT_MIN_BYTES
    max_bytes: int = DEFAULT_MAX_BYTES
    train_fraction: float = 0.5
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS


@dataclass
class LanguageModel:
    """A trained classifier plus everything needed to reproduce it."""

    maxent: MaxentModel
    comment_syntax: dict[str, CommentRules]
    keyword_tables: dict[str, KeywordTable]
    settings: PipelineSettings
    corpus_digest: str
    converged: bool = True

    @property
    def languages(self) -> tuple[str, ...]:
        return self.maxent.languages

    @property
    def grammar(self) -> Grammar:
        return self.maxent.grammar

    @property
    def weights(self) -> np.ndarray:
        return self.maxent.weights


@dataclass(frozen=True)
class ClassifyResult:
    """Languages ranked by probability, plus how much evidence was seen."""

    ranked: tuple[tuple[str, float], ...]
    matched_productions: int

    @property
    def best(self) -> str:
        return self.ranked[0][0]


def effective_syntax(
    languages: tuple[str, ...] | list[str], syntax: CommentSyntax
) -> dict[str, CommentRules]:
    """Restrict a syntax table to the corpus languages, defaulting gaps."""
    table: dict[str, CommentRules] = {}
    for language in languages:
        rules = syntax.get(language)
        if rules is None:
            log.warning(
                "no comment syntax for language %r; comments will not be stripped",
                language,
            )
            rules = CommentRules()
        table[language] = rules
    return table


def corpus_digest(manifest: CorpusManifest) -> str:
    payload = "\n".join(f"{r.language}\t{r.content_hash}" for r in manifest.records)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def train_from_manifest(
    manifest: CorpusManifest,
    syntax: CommentSyntax,
    settings: PipelineSettings | None = None,
    progress: Callable[[str], None] | None = None,
) -> tuple[LanguageModel, TrainResult]:
    """Run the full grammar-construction and training pipeline.

    Raises if the training manifest is empty or if no candidate clears
    the MI threshold (in which case the thresholds need adjusting).
    """
    if settings is None:
        settings = PipelineSettings()
    if not manifest.records:
        raise ValueError("empty training manifest")

    languages = manifest.languages
    syntax_table = effective_syntax(languages, syntax)

    contents = [record.path.read_bytes() for record in manifest.records]
    labels = [record.language for record in manifest.records]

    by_language: dict[str, list[bytes]] = {language: [] for language in languages}
    for raw, label in zip(contents, labels):
        by_language[label].append(raw)

    keyword_tables: dict[str, KeywordTable] = {}
    for language in languages:
        freqs = count_frequencies(by_language[language], language, syntax_table)
        keyword_tables[language] = build_keyword_table(
            freqs, settings.keyword_threshold
        )

    streams = [preprocess_text(raw) for raw in contents]
    candidate_sets = [
        extract_candidates(lexicalize(stream, keyword_tables[label]), settings.n_max)
        for stream, label in zip(streams, labels)
    ]
    stats = accumulate_stats(candidate_sets, labels, languages)
    grammar = select_grammar(stats, settings.mi_threshold)
    if not len(grammar):
        raise ValueError(
            "grammar is empty after MI selection; lower --mi-threshold or"
            " provide more training files"
        )

    feature_sets = [extract_features(stream, grammar) for stream in streams]
    training_set = make_training_set(feature_sets, labels, languages)
    result = train(
        training_set,
        grammar,
        TrainConfig(
            sigma=settings.sigma, tol=settings.tol, max_iters=settings.max_iters
        ),
        progress=progress,
    )

    model = LanguageModel(
        maxent=result.model,
        comment_syntax=syntax_table,
        keyword_tables=keyword_tables,
        settings=settings,
        corpus_digest=corpus_digest(manifest),
        converged=result.converged,
    )
    return model, result


def classify_text(model: LanguageModel, raw: bytes | str) -> ClassifyResult:
    """Preprocess, match grammar productions and rank the languages."""
    features = extract_features(preprocess_text(raw), model.grammar)
    prediction = predict(features, model.maxent)
    order = np.argsort(-prediction.probabilities, kind="stable")
    ranked = tuple(
        (model.languages[j], float(prediction.probabilities[j])) for j in order
    )
    return ClassifyResult(ranked=ranked, matched_productions=len(features))
