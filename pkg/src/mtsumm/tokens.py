"""Shared text normalizer used by every lexical metric and by dataset stats."""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    """Lowercase, split punctuation off words, collapse whitespace.

    "George Chuter." -> ["george", "chuter", "."]
    """
    return _TOKEN_RE.findall(text.lower())


def word_count(text: str) -> int:
    """Number of word-like tokens (punctuation tokens are not words)."""
    return sum(1 for tok in tokenize(text) if re.search(r"\w", tok))
