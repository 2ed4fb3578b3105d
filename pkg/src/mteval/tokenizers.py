"""Line tokenization for metric scoring.

Two modes are registered:

* ``whitespace`` -- split on unicode whitespace, collapsing runs.
* ``punct-split`` -- whitespace split, then peel leading/trailing
  punctuation characters off each token into tokens of their own.

Either mode accepts a ``+lower`` suffix (e.g. ``whitespace+lower``) that
lowercases the line first; scoring is case-sensitive by default.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import ConfigurationError

DEFAULT_MODE = "whitespace"
LOWER_SUFFIX = "+lower"

_BASE_MODES = ("whitespace", "punct-split")


@dataclass(frozen=True)
class TokenizedSentence:
    """An ordered token sequence plus the identifier of the tokenizer that made it."""

    tokens: tuple[str, ...]
    tokenizer_mode: str = DEFAULT_MODE

    def __post_init__(self) -> None:
        if any(tok == "" for tok in self.tokens):
            raise ConfigurationError("tokenized sentence may not contain empty tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def registered_modes() -> tuple[str, ...]:
    """All accepted mode identifiers, including the lowercasing variants."""
    return _BASE_MODES + tuple(m + LOWER_SUFFIX for m in _BASE_MODES)


def _split_mode(mode: str) -> tuple[str, bool]:
    lower = mode.endswith(LOWER_SUFFIX)
    base = mode[: -len(LOWER_SUFFIX)] if lower else mode
    if base not in _BASE_MODES:
        raise ConfigurationError(
            f"unknown tokenizer mode {mode!r}; registered: {', '.join(registered_modes())}"
        )
    return base, lower


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_punct(token: str) -> list[str]:
    # Peel punctuation off both ends; interior punctuation stays attached.
    lead: list[str] = []
    trail: list[str] = []
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        lead.append(token[start])
        start += 1
    while end > start and _is_punct(token[end - 1]):
        trail.append(token[end - 1])
        end -= 1
    core = token[start:end]
    return lead + ([core] if core else []) + list(reversed(trail))


def tokenize(text: str, mode: str = DEFAULT_MODE) -> TokenizedSentence:
    """Tokenize one line of text. Deterministic for a given (text, mode).

    An empty (or whitespace-only) line yields a zero-token sentence.
    Unknown modes raise :class:`ConfigurationError`.
    """
    base, lower = _split_mode(mode)
    if lower:
        text = text.lower()
    words = text.split()
    if base == "punct-split":
        tokens: list[str] = []
        for word in words:
            tokens.extend(_split_punct(word))
        return TokenizedSentence(tuple(tokens), mode)
    return TokenizedSentence(tuple(words), mode)
