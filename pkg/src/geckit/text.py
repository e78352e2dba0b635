"""Tokenized sentences and a rule-based tokenizer.

Tokens are plain strings (non-empty, no whitespace); a Sentence is an
immutable sequence of them whose canonical text form is the single-space
join.  The tokenizer splits on whitespace and detaches leading/trailing
punctuation, keeping decimal numbers and hyphenated compounds whole.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ValidationError

__all__ = ["Sentence", "tokenize", "detokenize"]


def check_token(text: str) -> str:
    """Validate one token: non-empty, no whitespace code points."""
    if not text:
        raise ValidationError("token must be non-empty")
    for ch in text:
        if ch.isspace():
            raise ValidationError(f"token {text!r} contains whitespace")
    return text


@dataclass(frozen=True)
class Sentence:
    """An immutable ordered sequence of tokens (possibly empty)."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        toks = tuple(self.tokens)
        object.__setattr__(self, "tokens", toks)
        for tok in toks:
            check_token(tok)

    @classmethod
    def from_text(cls, text: str) -> "Sentence":
        """Parse already-tokenized text by splitting on whitespace."""
        return cls(tuple(text.split()))

    @classmethod
    def of(cls, tokens: Iterable[str]) -> "Sentence":
        return cls(tuple(tokens))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]

    def __repr__(self) -> str:
        return f"Sentence({self.text!r})"


def _is_separable(ch: str) -> bool:
    # Punctuation (P*) and symbol (S*) code points are detached from
    # word edges; everything else stays attached.
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize(text: str, profile=None) -> Sentence:
    """Split raw text into a Sentence.

    Whitespace delimits chunks; leading and trailing punctuation of each
    chunk becomes separate single-character tokens.  Interior punctuation
    is kept, so "3.14", "don't" and hyphenated compounds survive whole.

    >>> tokenize("Hello, world.").tokens
    ('Hello', ',', 'world', '.')

    The profile argument is a hook for language-specific rules; the
    default rules are language-independent.
    """
    tokens: list[str] = []
    for chunk in text.split():
        start, end = 0, len(chunk)
        while start < end and _is_separable(chunk[start]):
            tokens.append(chunk[start])
            start += 1
        trail: list[str] = []
        while end > start and _is_separable(chunk[end - 1]):
            trail.append(chunk[end - 1])
            end -= 1
        if start < end:
            tokens.append(chunk[start:end])
        tokens.extend(reversed(trail))
    return Sentence(tuple(tokens))


def detokenize(sentence: Sentence) -> str:
    """Canonical text form of a sentence: single-space join."""
    return sentence.text
