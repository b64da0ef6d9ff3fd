"""Per-language keyword induction and stream lexicalization.

A word counts once per file it appears in (document frequency, not term
frequency), with comments stripped first so copyright boilerplate does
not pollute the vocabulary.  Words whose document frequency reaches the
threshold stay literal; everything else is generalized to a class token
(``__a__`` for alphabetic words, ``__s__`` for punctuation words).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .preprocess import (
    ALPHA_ID_TOKEN,
    PUNCT_ID_TOKEN,
    CommentSyntax,
    Token,
    TokenKind,
    TokenStream,
    preprocess_text,
    strip_comments,
)

DEFAULT_KEYWORD_THRESHOLD = 0.01

_COUNTED_KINDS = (TokenKind.ALPHA, TokenKind.PUNCT)


@dataclass
class WordFrequencyTable:
    """Document frequencies of alpha/punct words over one language's files."""

    language: str
    total_files: int
    doc_count: Counter[Token] = field(default_factory=Counter)

    def frequency(self, word: Token) -> float:
        return self.doc_count.get(word, 0) / self.total_files


@dataclass(frozen=True)
class KeywordTable:
    """The induced keyword set for one language.

    ``doc_counts`` retains the document counts of the keywords only, for
    inspection dumps and model persistence.
    """

    language: str
    threshold: float
    total_files: int
    keywords: frozenset[Token]
    doc_counts: Mapping[Token, int]


def count_frequencies(
    files: Iterable[bytes], language: str, syntax: CommentSyntax
) -> WordFrequencyTable:
    """Count in how many files each distinct word occurs.

    Each file is comment-stripped and preprocessed; repeats within a
    file do not add to the count and the structural marker tokens are
    never counted.
    """
    doc_count: Counter[Token] = Counter()
    total = 0
    for raw in files:
        total += 1
        stream = preprocess_text(strip_comments(raw, language, syntax))
        doc_count.update(
            {token for token in stream if token.kind in _COUNTED_KINDS}
        )
    if total == 0:
        raise ValueError(f"no usable files for language {language!r}")
    return WordFrequencyTable(language=language, total_files=total, doc_count=doc_count)


def build_keyword_table(
    freqs: WordFrequencyTable, threshold: float = DEFAULT_KEYWORD_THRESHOLD
) -> KeywordTable:
    """Keep words whose document frequency is at least ``threshold``."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"keyword threshold must be in (0, 1], got {threshold}")
    minimum = threshold * freqs.total_files
    keywords = frozenset(
        word for word, count in freqs.doc_count.items() if count >= minimum
    )
    return KeywordTable(
        language=freqs.language,
        threshold=threshold,
        total_files=freqs.total_files,
        keywords=keywords,
        doc_counts={word: freqs.doc_count[word] for word in keywords},
    )


def lexicalize(stream: TokenStream, table: KeywordTable) -> TokenStream:
    """Replace non-keyword words with their generic class token.

    Stream length and marker positions are preserved exactly.
    """
    keywords = table.keywords
    out: TokenStream = []
    for token in stream:
        if token.kind is TokenKind.ALPHA and token not in keywords:
            out.append(ALPHA_ID_TOKEN)
        elif token.kind is TokenKind.PUNCT and token not in keywords:
            out.append(PUNCT_ID_TOKEN)
        else:
            out.append(token)
    return out
