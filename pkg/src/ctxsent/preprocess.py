"""Tweet text normalization into stemmed token sequences.

Pipeline order is fixed: strip emoticons, replace URLs, replace mentions,
lowercase, squash character repeats, tokenize, stem. The ``URL`` and
``USERNAME`` sentinels survive lowercasing and stemming untouched.
"""

from __future__ import annotations

import re

from .emoticons import strip_emoticons
from .porter import stem as porter_stem

# Bump whenever tokenization output can change; model bundles record it.
PREPROCESS_VERSION = "1"

URL_TOKEN = "URL"
MENTION_TOKEN = "USERNAME"
SENTINELS = frozenset({URL_TOKEN, MENTION_TOKEN})

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
MENTION_RE = re.compile(r"(?<!\S)@\w+")
_REPEAT_RE = re.compile(r"(.)\1{2,}", re.DOTALL)
_EDGE_PUNCT_RE = re.compile(r"^[\W_]+|[\W_]+$")

# Private-use placeholders keep sentinels out of the way of lowercasing,
# squashing and punctuation stripping; padded so they always stand alone.
_URL_MARK = "\ue000"
_MENTION_MARK = "\ue001"
_MARKS = {_URL_MARK: URL_TOKEN, _MENTION_MARK: MENTION_TOKEN}


def replace_urls(text: str) -> str:
    return URL_RE.sub(URL_TOKEN, text)


def replace_mentions(text: str) -> str:
    """Replace ``@name`` with USERNAME when ``@`` starts a whitespace token."""
    return MENTION_RE.sub(MENTION_TOKEN, text)


def squash_repeats(text: str) -> str:
    """Shorten every run of 3+ identical characters to 2 ("goooood" -> "good")."""
    return _REPEAT_RE.sub(r"\1\1", text)


def stem(token: str) -> str:
    """Porter stem for lowercase ASCII alphabetic tokens; others pass through.

    A token the stemmer would erase entirely ("s" loses its plural suffix)
    is kept as is.
    """
    if token.isascii() and token.isalpha() and token.islower():
        return porter_stem(token) or token
    return token


def tokenize(text: str) -> list[str]:
    """Whitespace split, edge punctuation stripped, internal apostrophes kept."""
    tokens = []
    for piece in text.split():
        if piece in _MARKS:
            tokens.append(_MARKS[piece])
            continue
        piece = _EDGE_PUNCT_RE.sub("", piece)
        if piece:
            tokens.append(piece)
    return tokens


def normalize(text: str) -> list[str]:
    """Every pipeline stage except stemming."""
    text = strip_emoticons(text)
    text = URL_RE.sub(f" {_URL_MARK} ", text)
    text = MENTION_RE.sub(f" {_MENTION_MARK} ", text)
    text = squash_repeats(text.lower())
    return tokenize(text)


def preprocess(text: str) -> list[str]:
    """Turn raw tweet text into the token sequence the language models see.

    >>> preprocess("I loooove @bob http://x.y :)")
    ['i', 'loov', 'USERNAME', 'URL']
    """
    return [t if t in SENTINELS else stem(t) for t in normalize(text)]
