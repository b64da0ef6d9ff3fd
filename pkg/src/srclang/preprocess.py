"""Source-text normalization: tokenization and comment stripping.

Every file, whatever its language, is reduced to a stream of lowercase
tokens split by character class.  Alphabetic runs (letters, underscore,
and non-ASCII numerals) and punctuation runs keep their text; ASCII digit
runs collapse to a generic number token, newline runs to a single newline
token, and the stream is wrapped in begin/end-of-file markers.  Comment
stripping is the one piece of hardwired per-language knowledge and is
applied only where the caller asks for it (vocabulary counting).
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple


class TokenKind(enum.IntEnum):
    ALPHA = 0
    PUNCT = 1
    NUMBER = 2
    NEWLINE = 3
    BOF = 4
    EOF = 5
    # Generic identifier classes introduced by lexicalization; never
    # produced by preprocess_text itself.
    ALPHA_ID = 6
    PUNCT_ID = 7


class Token(NamedTuple):
    kind: TokenKind
    text: str = ""


TokenStream = list[Token]

NUMBER_TOKEN = Token(TokenKind.NUMBER)
NEWLINE_TOKEN = Token(TokenKind.NEWLINE)
BOF_TOKEN = Token(TokenKind.BOF)
EOF_TOKEN = Token(TokenKind.EOF)
ALPHA_ID_TOKEN = Token(TokenKind.ALPHA_ID)
PUNCT_ID_TOKEN = Token(TokenKind.PUNCT_ID)

# Reserved spellings used when a stream is rendered back to text.  The
# parse side matches them lowercase because rendered text goes through
# the lowercasing tokenizer again.
_SPELLING = {
    TokenKind.NUMBER: "__d__",
    TokenKind.NEWLINE: "__NL__",
    TokenKind.BOF: "__BOF__",
    TokenKind.EOF: "__EOF__",
    TokenKind.ALPHA_ID: "__a__",
    TokenKind.PUNCT_ID: "__s__",
}
_KIND_FOR_SPELLING = {s.lower(): k for k, s in _SPELLING.items()}
_ESCAPE_PREFIX = "__x__"

# One alternation, one pass.  Group order defines the class dispatch:
# ASCII digit runs, alpha runs (word chars minus ASCII digits, which
# keeps underscore, Unicode letters and non-ASCII numerals), newline
# runs, other whitespace, punctuation (everything else).
_SPLIT_RE = re.compile(
    r"([0-9]+)|((?:[^\W0-9])+)|([\r\n]+)|([^\S\r\n]+)|([^\w\s]+)"
)

_G_NUMBER, _G_ALPHA, _G_NEWLINE, _G_SPACE, _G_PUNCT = 1, 2, 3, 4, 5


def preprocess_text(raw: bytes | str) -> TokenStream:
    """Normalize raw source into a token stream.

    Total function: undecodable byte sequences become the substitution
    character (classified as punctuation) and empty input yields just
    the begin/end markers.
    """
    if isinstance(raw, bytes):
        text = raw.decode("utf-8", errors="replace")
    else:
        text = raw
    text = text.lower()

    tokens: TokenStream = [BOF_TOKEN]
    last_was_newline = False
    for match in _SPLIT_RE.finditer(text):
        group = match.lastindex
        if group == _G_SPACE:
            continue
        if group == _G_NEWLINE:
            if not last_was_newline:
                tokens.append(NEWLINE_TOKEN)
                last_was_newline = True
            continue
        last_was_newline = False
        if group == _G_NUMBER:
            tokens.append(NUMBER_TOKEN)
        elif group == _G_ALPHA:
            tokens.append(Token(TokenKind.ALPHA, match.group()))
        else:
            tokens.append(Token(TokenKind.PUNCT, match.group()))
    tokens.append(EOF_TOKEN)
    return tokens


def render_token(token: Token) -> str:
    """Render one token as text that parse_rendered maps back exactly."""
    spelling = _SPELLING.get(token.kind)
    if spelling is not None:
        return spelling
    text = token.text
    if token.kind is TokenKind.ALPHA and (
        text in _KIND_FOR_SPELLING or text.startswith(_ESCAPE_PREFIX)
    ):
        return _ESCAPE_PREFIX + text
    return text


def render_stream(tokens: Iterable[Token]) -> str:
    return " ".join(render_token(t) for t in tokens)


def parse_rendered(text: str) -> TokenStream:
    """Inverse of render_stream: re-tokenize and restore reserved spellings.

    The outer begin/end markers added by re-tokenization are dropped;
    markers rendered as their spellings come back as tokens, so
    parse_rendered(render_stream(s)) == s for any valid stream.
    """
    out: TokenStream = []
    for token in preprocess_text(text)[1:-1]:
        if token.kind is TokenKind.ALPHA:
            mapped = _KIND_FOR_SPELLING.get(token.text)
            if mapped is not None:
                out.append(Token(mapped))
                continue
            if token.text.startswith(_ESCAPE_PREFIX):
                out.append(Token(TokenKind.ALPHA, token.text[len(_ESCAPE_PREFIX):]))
                continue
        out.append(token)
    return out


@dataclass(frozen=True)
class CommentRules:
    """Comment markers for one language; empty rules strip nothing."""

    line_markers: tuple[str, ...] = ()
    block_pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        for marker in self.line_markers:
            if not marker:
                raise ValueError("empty line comment marker")
        for opener, closer in self.block_pairs:
            if not opener or not closer:
                raise ValueError("empty block comment marker")


CommentSyntax = Mapping[str, CommentRules]

_NEWLINE_BYTES_RE = re.compile(rb"[\r\n]")


@lru_cache(maxsize=256)
def _marker_re(rules: CommentRules) -> "tuple[re.Pattern[bytes], tuple[bytes | None, ...]] | None":
    markers: list[tuple[bytes, bytes | None]] = []
    for marker in rules.line_markers:
        markers.append((marker.encode("utf-8"), None))
    for opener, closer in rules.block_pairs:
        markers.append((opener.encode("utf-8"), closer.encode("utf-8")))
    if not markers:
        return None
    # Longest marker listed first so it wins when several match at the
    # same position.
    markers.sort(key=lambda m: len(m[0]), reverse=True)
    pattern = b"|".join(b"(" + re.escape(m) + b")" for m, _ in markers)
    return re.compile(pattern), tuple(closer for _, closer in markers)


def strip_comments(raw: bytes, language: str, syntax: CommentSyntax) -> bytes:
    """Replace each comment span with a single newline byte.

    Line comments run from the marker to the end of the line; block
    comments run to the first close marker or to end of input.  There is
    no string-literal awareness: a marker inside a string starts a
    comment.
    """
    try:
        rules = syntax[language]
    except KeyError:
        raise LookupError(f"no comment syntax entry for language {language!r}") from None
    compiled = _marker_re(rules)
    if compiled is None:
        return raw

    pattern, closers = compiled
    parts: list[bytes] = []
    pos = 0
    while True:
        match = pattern.search(raw, pos)
        if match is None:
            parts.append(raw[pos:])
            break
        parts.append(raw[pos:match.start()])
        parts.append(b"\n")
        closer = closers[match.lastindex - 1]
        if closer is None:
            eol = _NEWLINE_BYTES_RE.search(raw, match.end())
            pos = eol.start() if eol else len(raw)
        else:
            end = raw.find(closer, match.end())
            pos = end + len(closer) if end != -1 else len(raw)
    return b"".join(parts)


def load_comment_syntax(path: str | Path) -> dict[str, CommentRules]:
    """Load a comment-syntax table from a JSON config file.

    Schema: ``{"language": {"line": [...], "blocks": [[open, close], ...]}}``.
    """
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    return _syntax_from_mapping(data)


def _syntax_from_mapping(data: Mapping) -> dict[str, CommentRules]:
    table: dict[str, CommentRules] = {}
    for language, entry in data.items():
        table[language] = CommentRules(
            line_markers=tuple(entry.get("line", ())),
            block_pairs=tuple((o, c) for o, c in entry.get("blocks", ())),
        )
    return table


@lru_cache(maxsize=1)
def default_comment_syntax() -> dict[str, CommentRules]:
    """Comment rules shipped for the stock language set."""
    text = resources.files("srclang.data").joinpath("comment_syntax.json").read_text("utf-8")
    return _syntax_from_mapping(json.loads(text))
