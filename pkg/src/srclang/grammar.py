"""Cross-language grammar induction and matching.

The grammar is one global set of token n-grams (n up to 3) harvested
from lexicalized training streams and filtered by how much information
the presence or absence of each n-gram carries about the language label
(mutual information over the per-file presence/absence contingency
table, natural log).  Selected productions act as binary presence
features: a production with a generic identifier slot matches any token
of that class, so it can be checked against plain preprocessed streams
where keyword status is unknown.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .preprocess import (
    ALPHA_ID_TOKEN,
    PUNCT_ID_TOKEN,
    Token,
    TokenKind,
    TokenStream,
    render_stream,
)

log = logging.getLogger(__name__)

Pattern = tuple[Token, ...]

DEFAULT_MI_THRESHOLD = 0.05
MAX_NGRAM = 3


@dataclass(frozen=True)
class Production:
    pattern: Pattern
    mi_score: float

    def __post_init__(self) -> None:
        if not 1 <= len(self.pattern) <= MAX_NGRAM:
            raise ValueError(f"pattern length must be 1..{MAX_NGRAM}, got {len(self.pattern)}")
        if self.mi_score < 0:
            raise ValueError(f"MI score must be nonnegative, got {self.mi_score}")

    def __str__(self) -> str:
        return render_stream(self.pattern)


def extract_candidates(stream: TokenStream, n_max: int = MAX_NGRAM) -> set[Pattern]:
    """All distinct contiguous token windows of length 1..n_max."""
    candidates: set[Pattern] = set()
    total = len(stream)
    for n in range(1, n_max + 1):
        for i in range(total - n + 1):
            candidates.add(tuple(stream[i : i + n]))
    return candidates


class ProductionStats:
    """Per-language presence counts for every candidate production.

    For each candidate and language j, ``present_count[p][j]`` is the
    number of language-j training files whose candidate set contains p;
    together with ``file_count[j]`` this is the full presence/absence
    contingency table.
    """

    __slots__ = ("languages", "file_count", "present_count")

    def __init__(self, languages: Sequence[str]):
        if len(set(languages)) != len(languages):
            raise ValueError("duplicate language ids")
        self.languages = tuple(languages)
        self.file_count = [0] * len(self.languages)
        self.present_count: dict[Pattern, list[int]] = {}

    @property
    def total_files(self) -> int:
        return sum(self.file_count)

    def counts_for(self, pattern: Pattern) -> list[int]:
        zeros = [0] * len(self.languages)
        return self.present_count.get(pattern, zeros)


def accumulate_stats(
    candidate_sets: Iterable[set[Pattern]],
    labels: Iterable[str],
    languages: Sequence[str] | None = None,
) -> ProductionStats:
    """Pool per-file candidate sets into one global contingency table."""
    candidate_sets = list(candidate_sets)
    labels = list(labels)
    if len(candidate_sets) != len(labels):
        raise ValueError("candidate sets and labels differ in length")
    if languages is None:
        languages = sorted(set(labels))
    stats = ProductionStats(languages)
    index = {language: j for j, language in enumerate(stats.languages)}
    n_languages = len(stats.languages)
    for candidates, label in zip(candidate_sets, labels):
        j = index[label]
        stats.file_count[j] += 1
        for pattern in candidates:
            row = stats.present_count.get(pattern)
            if row is None:
                row = stats.present_count[pattern] = [0] * n_languages
            row[j] += 1
    return stats


def mutual_information(pattern: Pattern, stats: ProductionStats) -> float:
    """Mutual information (nats) between presence of a production and the label.

    Sums p(f, l) * ln(p(f, l) / (p(f) p(l))) over the presence/absence
    rows and all languages, with empty cells contributing zero.
    """
    n_total = stats.total_files
    if n_total == 0:
        raise ValueError("empty statistics table")
    counts = stats.counts_for(pattern)
    present_total = sum(counts)
    absent_total = n_total - present_total
    mi = 0.0
    for present_j, files_j in zip(counts, stats.file_count):
        if files_j == 0:
            continue
        # joint * N / (marginal_f * marginal_l) == p(f,l) / (p(f) p(l))
        if present_j:
            mi += (present_j / n_total) * math.log(
                present_j * n_total / (present_total * files_j)
            )
        absent_j = files_j - present_j
        if absent_j:
            mi += (absent_j / n_total) * math.log(
                absent_j * n_total / (absent_total * files_j)
            )
    return mi


def _pattern_sort_key(pattern: Pattern) -> tuple:
    return tuple((int(token.kind), token.text) for token in pattern)


class Grammar:
    """An immutable, deterministically ordered set of productions."""

    __slots__ = ("productions", "pattern_ids")

    def __init__(self, productions: Sequence[Production]):
        self.productions = tuple(productions)
        self.pattern_ids = {p.pattern: i for i, p in enumerate(self.productions)}
        if len(self.pattern_ids) != len(self.productions):
            raise ValueError("duplicate production pattern")

    def __len__(self) -> int:
        return len(self.productions)

    def __iter__(self) -> Iterator[Production]:
        return iter(self.productions)

    def __getitem__(self, production_id: int) -> Production:
        return self.productions[production_id]

    def size_by_length(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for production in self.productions:
            n = len(production.pattern)
            sizes[n] = sizes.get(n, 0) + 1
        return sizes


def select_grammar(
    stats: ProductionStats, mi_threshold: float = DEFAULT_MI_THRESHOLD
) -> Grammar:
    """Retain candidates whose MI exceeds the threshold.

    Productions are ordered by descending score, ties broken by pattern,
    so the grammar (and everything downstream of its ids) is reproducible.
    """
    if mi_threshold < 0:
        raise ValueError(f"MI threshold must be nonnegative, got {mi_threshold}")
    scored = []
    for pattern in stats.present_count:
        mi = mutual_information(pattern, stats)
        if mi > mi_threshold:
            scored.append(Production(pattern=pattern, mi_score=mi))
    scored.sort(key=lambda p: (-p.mi_score, _pattern_sort_key(p.pattern)))
    if not scored:
        log.warning("no candidate cleared the MI threshold %g; grammar is empty", mi_threshold)
    return Grammar(scored)


def production_matches_at(pattern: Pattern, stream: TokenStream, position: int) -> bool:
    """True if the pattern matches the stream tokens starting at position.

    Literal tokens must match kind and text; the generic identifier
    tokens match any token of their class; marker tokens match the same
    marker kind.
    """
    if position < 0 or position + len(pattern) > len(stream):
        raise IndexError("pattern window exceeds stream bounds")
    for offset, wanted in enumerate(pattern):
        actual = stream[position + offset]
        kind = wanted.kind
        if kind is TokenKind.ALPHA_ID:
            if actual.kind not in (TokenKind.ALPHA, TokenKind.ALPHA_ID):
                return False
        elif kind is TokenKind.PUNCT_ID:
            if actual.kind not in (TokenKind.PUNCT, TokenKind.PUNCT_ID):
                return False
        elif kind in (TokenKind.ALPHA, TokenKind.PUNCT):
            if actual != wanted:
                return False
        elif actual.kind is not kind:
            return False
    return True


def extract_features(stream: TokenStream, grammar: Grammar) -> set[int]:
    """Ids of all grammar productions present somewhere in the stream.

    Instead of scanning every production against every position, each
    window is generalized (every alpha/punct token either literal or as
    its class token, at most 2**n variants) and the variants are probed
    in the grammar's pattern index.  The result is exactly the set a
    full position-by-production scan would produce.
    """
    index = grammar.pattern_ids
    if not index:
        return set()
    found: set[int] = set()
    variants: list[tuple[Token, ...]] = []
    for token in stream:
        if token.kind is TokenKind.ALPHA:
            variants.append((token, ALPHA_ID_TOKEN))
        elif token.kind is TokenKind.PUNCT:
            variants.append((token, PUNCT_ID_TOKEN))
        else:
            variants.append((token,))

    get = index.get
    total = len(variants)
    for i in range(total):
        for first in variants[i]:
            hit = get((first,))
            if hit is not None:
                found.add(hit)
            if i + 1 < total:
                for second in variants[i + 1]:
                    hit = get((first, second))
                    if hit is not None:
                        found.add(hit)
                    if i + 2 < total:
                        for third in variants[i + 2]:
                            hit = get((first, second, third))
                            if hit is not None:
                                found.add(hit)
    return found
