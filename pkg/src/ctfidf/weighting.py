"""Term weighting: classic TF-IDF and the clement arcsinh variant.

Both schemes share the max-normalized term frequency

    tf(t, d) = count(t, d) / max_w count(w, d).

Classic inverse document frequency is ln(N / df); the clement variant uses
arcsinh(N / df) = ln(x + sqrt(x^2 + 1)), which is strictly positive even
for terms present in every document, and adds a small corpus-level offset
idf / N at every occupied cell:

    weight(t, d) = idf(t) / N + tf(t, d) * idf(t).

The offset is applied only where the count is nonzero; applying it
everywhere would densify the matrix (see ``dense_offset``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dfm import Vocabulary
from .exceptions import DimensionMismatchError


class Scheme(enum.Enum):
    TFIDF_CLASSIC = "tfidf"
    CTF_IDF = "ctfidf"


@dataclass(frozen=True)
class WeightingModel:
    """IDF statistics frozen at fit time (training corpus only)."""

    scheme: Scheme
    idf: np.ndarray
    n_docs: int

    def to_dict(self) -> dict:
        return {"scheme": self.scheme.value, "nDocs": self.n_docs,
                "idf": self.idf.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "WeightingModel":
        return cls(Scheme(d["scheme"]), np.asarray(d["idf"], dtype=np.float64),
                   int(d["nDocs"]))


def tf_row(counts):
    """Max-normalize one row of counts; an all-zero row stays all-zero."""
    if sp.issparse(counts):
        row = counts.tocsr()
        out = row.astype(np.float64)
        if out.nnz:
            m = out.data.max()
            if m > 0:
                out.data = out.data / m
        return out
    arr = np.asarray(counts, dtype=np.float64)
    m = arr.max() if arr.size else 0.0
    return arr / m if m > 0 else arr.copy()


def _tf_matrix(counts: sp.csr_matrix) -> sp.csr_matrix:
    """Row-wise max normalization of a CSR count matrix."""
    X = counts.tocsr().astype(np.float64, copy=True)
    X.sum_duplicates()
    if X.nnz == 0:
        return X
    row_max = np.zeros(X.shape[0])
    nz_per_row = np.diff(X.indptr)
    occupied = nz_per_row > 0
    row_max[occupied] = np.maximum.reduceat(
        X.data, X.indptr[:-1][occupied])
    inv = np.zeros_like(row_max)
    np.divide(1.0, row_max, out=inv, where=row_max > 0)
    X.data = X.data * np.repeat(inv, nz_per_row)
    return X


def idf_classic(vocab: Vocabulary) -> np.ndarray:
    """ln(N / df); zero for terms present in every document."""
    return np.log(vocab.n_docs / vocab.doc_freq.astype(np.float64))


def idf_arcsinh(vocab: Vocabulary) -> np.ndarray:
    """arcsinh(N / df); strictly positive since N / df >= 1."""
    return np.arcsinh(vocab.n_docs / vocab.doc_freq.astype(np.float64))


def fit_weighting(vocab: Vocabulary, scheme: Scheme) -> WeightingModel:
    if scheme is Scheme.CTF_IDF:
        idf = idf_arcsinh(vocab)
    else:
        idf = idf_classic(vocab)
    return WeightingModel(scheme=scheme, idf=idf, n_docs=vocab.n_docs)


def apply_weighting(counts: sp.csr_matrix, model: WeightingModel, *,
                    dense_offset: bool = False):
    """Weight a count matrix with a fitted model.

    Returns CSR with the same shape; the sparsity pattern never grows.
    With ``dense_offset=True`` (clement scheme only) the idf / N term is
    added at every cell, which materializes a dense ndarray.
    """
    if counts.shape[1] != model.idf.shape[0]:
        raise DimensionMismatchError(
            f"matrix has {counts.shape[1]} columns, model has "
            f"{model.idf.shape[0]} idf entries")
    tf = _tf_matrix(counts)
    if model.scheme is Scheme.TFIDF_CLASSIC:
        out = tf
        out.data = out.data * model.idf[out.indices]
        out.eliminate_zeros()
        return out
    offset = model.idf / model.n_docs
    if dense_offset:
        dense = tf.toarray() * model.idf + offset
        return dense
    out = tf
    out.data = out.data * model.idf[out.indices] + offset[out.indices]
    return out
