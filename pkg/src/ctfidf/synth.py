"""Seeded synthetic SMS-like corpora for demos and end-to-end tests.

The generator mixes class-specific token pools with shared filler so the
two classes are separable but not trivially so. It exists to exercise the
pipeline when the public datasets are not on disk; accuracy numbers on
synthetic text say nothing about the published benchmarks.
"""

from __future__ import annotations

import numpy as np

_SPAMMY = ["win", "winner", "free", "prize", "cash", "claim", "urgent",
           "guaranteed", "txt", "call", "now", "offer", "bonus", "award",
           "ringtone", "subscribe", "mobile", "rate", "entry", "voucher"]
_HAMMY = ["meeting", "home", "dinner", "tomorrow", "love", "thanks", "see",
          "later", "work", "lunch", "sorry", "time", "good", "night",
          "morning", "friend", "week", "movie", "train", "ticket"]
_FILLER = ["the", "you", "to", "a", "and", "is", "in", "it", "for", "of",
           "that", "on", "my", "at", "be", "we", "ok", "so", "just", "get"]


def generate_message(rng: np.random.Generator, spam: bool) -> str:
    length = int(rng.integers(5, 18))
    pool = _SPAMMY if spam else _HAMMY
    words = []
    for _ in range(length):
        r = rng.random()
        if r < 0.55:
            words.append(pool[int(rng.integers(len(pool)))])
        elif r < 0.95:
            words.append(_FILLER[int(rng.integers(len(_FILLER)))])
        else:
            other = _HAMMY if spam else _SPAMMY
            words.append(other[int(rng.integers(len(other)))])
    if spam and rng.random() < 0.5:
        words.append(str(rng.integers(10**9, 10**10)))
    return " ".join(words)


def generate_corpus(n_ham: int, n_spam: int,
                    seed: int = 0) -> list[tuple[str, str]]:
    """Deterministic list of (label, text) pairs, ham first."""
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = [("ham", generate_message(rng, False)) for _ in range(n_ham)]
    rows += [("spam", generate_message(rng, True)) for _ in range(n_spam)]
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]


def write_tsv(path: str, rows: list[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label, text in rows:
            fh.write(f"{label}\t{text}\n")
