"""Text preparation: tokenization, stopword removal, stemming.

The stage order is fixed: tokenize (lowercased) -> stopword filter ->
optional number filter -> length filter -> stem. Stopwords are matched
against tokens as written, before stemming, so the shipped (unstemmed)
word list applies directly.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources

from .porter import porter_stem

_TOKEN_RE = re.compile(r"[^\W_]+")  # maximal runs of Unicode letters/digits

_STOPWORD_RESOURCE = "stopwords_english.txt"
STOPWORD_LIST_NAME = "snowball-english"


def _stopword_bytes() -> bytes:
    return (resources.files("ctfidf") / "data" / _STOPWORD_RESOURCE).read_bytes()


def stopword_list_hash() -> str:
    """SHA-256 of the shipped stopword file, recorded in run reports."""
    return hashlib.sha256(_stopword_bytes()).hexdigest()


def load_stopwords() -> frozenset[str]:
    words = _stopword_bytes().decode("utf-8").split("\n")
    return frozenset(w.strip() for w in words if w.strip())


@dataclass(frozen=True)
class PreprocessConfig:
    """Knobs for the preparation pipeline.

    ``remove_numbers`` defaults to False: digit runs (phone numbers,
    prices) are predictive for spam. ``min_token_length`` defaults to 1 so
    short informative tokens like "txt" survive.
    """

    stopword_list: str = STOPWORD_LIST_NAME
    stopword_hash: str = field(default_factory=stopword_list_hash)
    remove_numbers: bool = False
    min_token_length: int = 1

    def validate(self) -> None:
        if self.stopword_list != STOPWORD_LIST_NAME:
            raise ValueError(f"unknown stopword list {self.stopword_list!r}")
        shipped = stopword_list_hash()
        if self.stopword_hash != shipped:
            raise ValueError(
                "stopword hash mismatch: config has "
                f"{self.stopword_hash[:12]}..., shipped list is {shipped[:12]}...")
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be >= 1")


@dataclass(frozen=True)
class ProcessedDoc:
    """Stem sequence for one document, keyed back to its corpus position."""

    stems: tuple[str, ...]
    original_index: int


def tokenize(text: str) -> list[str]:
    """Split into lowercase tokens: maximal runs of letters/digits."""
    return _TOKEN_RE.findall(text.lower())


def remove_stopwords(tokens: list[str], stopwords: frozenset[str]) -> list[str]:
    return [t for t in tokens if t not in stopwords]


def preprocess_doc(text: str, config: PreprocessConfig,
                   original_index: int = 0,
                   stopwords: frozenset[str] | None = None) -> ProcessedDoc:
    """Run the full pipeline on one document.

    A document that loses every token is kept as an empty doc so row
    indices stay aligned with labels downstream.
    """
    if stopwords is None:
        stopwords = load_stopwords()
    tokens = remove_stopwords(tokenize(text), stopwords)
    if config.remove_numbers:
        tokens = [t for t in tokens if not t.isdigit()]
    if config.min_token_length > 1:
        tokens = [t for t in tokens if len(t) >= config.min_token_length]
    return ProcessedDoc(tuple(porter_stem(t) for t in tokens), original_index)


def preprocess_corpus(texts: list[str],
                      config: PreprocessConfig | None = None) -> list[ProcessedDoc]:
    """Apply :func:`preprocess_doc` to every text, preserving order."""
    if config is None:
        config = PreprocessConfig()
    config.validate()
    stopwords = load_stopwords()
    return [preprocess_doc(t, config, i, stopwords)
            for i, t in enumerate(texts)]
