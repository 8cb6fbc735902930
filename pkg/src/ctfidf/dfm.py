"""Vocabulary construction and sparse document-frequency matrices.

The matrix is CSR (scipy) with one row per document and one column per
vocabulary term, values being in-document term counts. Column order is
lexicographic by term so matrices are identical across runs and platforms.
Only unigrams are counted.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyVocabularyError
from .preprocess import ProcessedDoc


@dataclass(frozen=True)
class Vocabulary:
    """Term <-> column mapping with training document frequencies."""

    term_to_index: dict[str, int]
    index_to_term: tuple[str, ...]
    doc_freq: np.ndarray  # int64, per-term count of docs containing it
    n_docs: int

    def __len__(self) -> int:
        return len(self.index_to_term)


def build_vocabulary(docs: list[ProcessedDoc],
                     min_doc_freq: int = 1) -> Vocabulary:
    """Collect distinct stems with document frequency >= ``min_doc_freq``.

    Duplicate stems within one document count once toward its frequency.
    """
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.stems))
    terms = sorted(t for t, c in df.items() if c >= min_doc_freq)
    if not terms:
        raise EmptyVocabularyError(
            f"no term has document frequency >= {min_doc_freq} "
            f"across {len(docs)} document(s)")
    doc_freq = np.array([df[t] for t in terms], dtype=np.int64)
    return Vocabulary(term_to_index={t: j for j, t in enumerate(terms)},
                      index_to_term=tuple(terms),
                      doc_freq=doc_freq,
                      n_docs=len(docs))


def build_dfm(docs: list[ProcessedDoc], vocab: Vocabulary) -> sp.csr_matrix:
    """Count vocabulary terms per document; unknown stems are dropped.

    Out-of-vocabulary stems at apply time have no IDF statistic, so they
    contribute nothing (fit-on-train, apply-on-test discipline).
    """
    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []
    t2i = vocab.term_to_index
    for i, doc in enumerate(docs):
        counts = Counter(doc.stems)
        for stem, c in counts.items():
            j = t2i.get(stem)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(c)
    X = sp.csr_matrix(
        (np.asarray(vals, dtype=np.float64),
         (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(len(docs), len(vocab)))
    X.sum_duplicates()
    X.sort_indices()
    return X


def dump_matrix_market(path: str, X: sp.spmatrix) -> None:
    """Write a matrix in MatrixMarket coordinate format (debug/oracle use)."""
    from scipy.io import mmwrite

    mmwrite(path, sp.coo_matrix(X))
