"""Single-file model persistence.

A model is one gzipped JSON document: versioned, self-describing, and
written deterministically (sorted keys, fixed gzip timestamp) so that
retraining on identical inputs reproduces the file byte for byte.
Floats survive the JSON round trip exactly, which makes predictions
from a reloaded model bit-identical to the in-memory ones.
"""

from __future__ import annotations

import gzip
import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .grammar import Grammar, Production
from .maxent import MaxentModel
from .pipeline import LanguageModel, PipelineSettings
from .preprocess import CommentRules, Token, parse_rendered, render_stream, render_token
from .vocabulary import KeywordTable

FORMAT_NAME = "srclang-model"
FORMAT_VERSION = 1


def _syntax_payload(syntax: dict[str, CommentRules]) -> dict:
    return {
        language: {
            "line": list(rules.line_markers),
            "blocks": [list(pair) for pair in rules.block_pairs],
        }
        for language, rules in syntax.items()
    }


def _preprocess_digest(syntax_payload: dict, n_max: int) -> str:
    canonical = json.dumps(
        {"comment_syntax": syntax_payload, "n_max": n_max},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(model: LanguageModel, path: Path | str) -> None:
    syntax_payload = _syntax_payload(model.comment_syntax)
    payload = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "preprocess_digest": _preprocess_digest(syntax_payload, model.settings.n_max),
        "languages": list(model.languages),
        "comment_syntax": syntax_payload,
        "keywords": {
            table.language: {
                "threshold": table.threshold,
                "total_files": table.total_files,
                "entries": sorted(
                    (render_token(word), count)
                    for word, count in table.doc_counts.items()
                ),
            }
            for table in model.keyword_tables.values()
        },
        "grammar": [
            [production.mi_score, render_stream(production.pattern)]
            for production in model.grammar
        ],
        "weights": model.weights.tolist(),
        "sigma": model.maxent.sigma,
        "settings": asdict(model.settings),
        "corpus_digest": model.corpus_digest,
        "converged": model.converged,
    }
    data = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    Path(path).write_bytes(gzip.compress(data.encode("utf-8"), 9, mtime=0))


def _parse_word(rendered: str) -> Token:
    tokens = parse_rendered(rendered)
    if len(tokens) != 1:
        raise ValueError(f"corrupt keyword entry: {rendered!r}")
    return tokens[0]


def load_model(path: Path | str) -> LanguageModel:
    """Load a model file, rejecting unknown formats or versions."""
    try:
        data = gzip.decompress(Path(path).read_bytes())
        payload = json.loads(data)
    except (OSError, ValueError) as exc:
        raise ValueError(f"cannot read model file {path}: {exc}") from exc

    if payload.get("format") != FORMAT_NAME:
        raise ValueError(f"{path} is not a {FORMAT_NAME} file")
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(
            f"unsupported model format version {version!r}"
            f" (this build reads version {FORMAT_VERSION})"
        )

    syntax = {
        language: CommentRules(
            line_markers=tuple(entry.get("line", ())),
            block_pairs=tuple((o, c) for o, c in entry.get("blocks", ())),
        )
        for language, entry in payload["comment_syntax"].items()
    }
    keyword_tables = {}
    for language, entry in payload["keywords"].items():
        doc_counts = {
            _parse_word(rendered): int(count) for rendered, count in entry["entries"]
        }
        keyword_tables[language] = KeywordTable(
            language=language,
            threshold=float(entry["threshold"]),
            total_files=int(entry["total_files"]),
            keywords=frozenset(doc_counts),
            doc_counts=doc_counts,
        )
    grammar = Grammar(
        [
            Production(pattern=tuple(parse_rendered(rendered)), mi_score=float(mi))
            for mi, rendered in payload["grammar"]
        ]
    )
    weights = np.asarray(payload["weights"], dtype=np.float64)
    if weights.size == 0:
        weights = weights.reshape(len(grammar), len(payload["languages"]))
    maxent = MaxentModel(
        languages=tuple(payload["languages"]),
        grammar=grammar,
        weights=weights,
        sigma=float(payload["sigma"]),
    )
    return LanguageModel(
        maxent=maxent,
        comment_syntax=syntax,
        keyword_tables=keyword_tables,
        settings=PipelineSettings(**payload["settings"]),
        corpus_digest=payload["corpus_digest"],
        converged=bool(payload["converged"]),
    )
