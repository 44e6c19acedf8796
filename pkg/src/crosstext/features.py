"""Hybrid document features: char n-gram binary TF-IDF + scaled embeddings.

The n-gram channel analyzes the document's tokens joined by single spaces,
so n-grams may span token boundaries through the joining space. Term
frequency is binary (presence only); weights use the smoothed inverse
document frequency ln((1+N)/(1+df)) + 1 and the sparse block is
L2-normalized. The dense channel is the min-max-scaled averaged embedding,
clipped to [0, 1] at transform time.

For the classifier the two blocks form one concatenated vector of width
``|vocabulary| + dim`` with the n-gram columns first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import LabeledDoc
from .embeddings import EmbeddingTable, embed_document
from .errors import DataError


class SparseBlock(NamedTuple):
    """L2-normalized n-gram weights, indices strictly increasing."""

    indices: np.ndarray
    values: np.ndarray


@dataclass
class NgramVocabulary:
    """Fitted character n-gram inventory with document frequencies."""

    n_min: int
    n_max: int
    entries: dict[str, tuple[int, int]]  # ngram -> (column index, df)
    n_docs: int
    idf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        df = np.empty(len(self.entries))
        for column, freq in self.entries.values():
            df[column] = freq
        self.idf = np.log((1.0 + self.n_docs) / (1.0 + df)) + 1.0

    @property
    def size(self) -> int:
        return len(self.entries)

    def ordered_entries(self) -> list[tuple[str, int]]:
        """(ngram, df) pairs in column-index order."""
        by_column = sorted(self.entries.items(), key=lambda kv: kv[1][0])
        return [(gram, freq) for gram, (_, freq) in by_column]


@dataclass
class FeatureVector:
    """Sparse n-gram block plus dense scaled-embedding block for one doc."""

    sparse_indices: np.ndarray
    sparse_values: np.ndarray
    dense: np.ndarray
    n_sparse: int
    oov_count: int = 0

    @property
    def width(self) -> int:
        return self.n_sparse + len(self.dense)

    @property
    def sparse(self) -> list[tuple[int, float]]:
        return list(zip(self.sparse_indices.tolist(), self.sparse_values.tolist()))

    def densify(self) -> np.ndarray:
        out = np.zeros(self.width)
        out[self.sparse_indices] = self.sparse_values
        out[self.n_sparse :] = self.dense
        return out


def analysis_string(doc: LabeledDoc) -> str:
    return " ".join(doc.tokens)


def char_ngrams(text: str, n_min: int, n_max: int) -> set[str]:
    """All distinct character n-grams of ``text`` with n in [n_min, n_max]."""
    grams: set[str] = set()
    length = len(text)
    for n in range(n_min, min(n_max, length) + 1):
        for i in range(length - n + 1):
            grams.add(text[i : i + n])
    return grams


def fit_ngrams(
    train_docs: Iterable[LabeledDoc],
    n_min: int = 3,
    n_max: int = 10,
    min_df: int = 1,
) -> NgramVocabulary:
    """Collect document frequencies and assign lexicographic column indices.

    Document frequency counts documents, not occurrences; n-grams with
    df < min_df are dropped.
    """
    if not (1 <= n_min <= n_max):
        raise ValueError(f"need 1 <= n_min <= n_max, got {n_min}..{n_max}")
    df: dict[str, int] = {}
    n_docs = 0
    for doc in train_docs:
        n_docs += 1
        for gram in char_ngrams(analysis_string(doc), n_min, n_max):
            df[gram] = df.get(gram, 0) + 1
    if n_docs == 0:
        raise ValueError("cannot fit n-gram vocabulary on an empty corpus")
    kept = sorted(g for g, freq in df.items() if freq >= min_df)
    if not kept:
        raise DataError("effective n-gram vocabulary is empty")
    entries = {gram: (column, df[gram]) for column, gram in enumerate(kept)}
    return NgramVocabulary(n_min=n_min, n_max=n_max, entries=entries, n_docs=n_docs)


def vectorize_ngrams(doc: LabeledDoc, vocab: NgramVocabulary) -> SparseBlock:
    """Binary TF-IDF weights for the vocabulary n-grams present in ``doc``.

    The result is L2-normalized; a document with no vocabulary n-gram
    yields an empty block.
    """
    entries = vocab.entries
    columns = sorted(
        entries[gram][0]
        for gram in char_ngrams(analysis_string(doc), vocab.n_min, vocab.n_max)
        if gram in entries
    )
    if not columns:
        return SparseBlock(np.empty(0, dtype=np.int64), np.empty(0))
    indices = np.array(columns, dtype=np.int64)
    values = vocab.idf[indices].copy()
    values /= np.linalg.norm(values)
    return SparseBlock(indices, values)


class MinMaxScaler(BaseEstimator, TransformerMixin):
    """Per-dimension min-max scaling fitted on training vectors.

    Dimensions that are constant in training map to 0; transformed values
    are clipped to [0, 1] because test-time inputs may exceed the training
    range.
    """

    def fit(self, X: np.ndarray, y: object = None) -> "MinMaxScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("expected a non-empty 2-D array of dense vectors")
        self.mins_ = X.min(axis=0)
        self.maxs_ = X.max(axis=0)
        return self

    def transform_one(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != self.mins_.shape:
            raise ValueError(f"expected dim {self.mins_.shape[0]}, got {v.shape}")
        span = self.maxs_ - self.mins_
        out = np.zeros_like(v)
        scaled = span > 0
        out[scaled] = (v[scaled] - self.mins_[scaled]) / span[scaled]
        np.clip(out, 0.0, 1.0, out=out)
        return out

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            return self.transform_one(X)
        return np.vstack([self.transform_one(row) for row in X])


def fit_minmax(dense_vectors: Iterable[np.ndarray]) -> MinMaxScaler:
    return MinMaxScaler().fit(np.vstack(list(dense_vectors)))


def apply_minmax(v: np.ndarray, scaler: MinMaxScaler) -> np.ndarray:
    return scaler.transform_one(v)


class CharNgramVectorizer(BaseEstimator, TransformerMixin):
    """Estimator wrapper around the n-gram vocabulary fit/transform pair."""

    def __init__(self, n_min: int = 3, n_max: int = 10, min_df: int = 1):
        self.n_min = n_min
        self.n_max = n_max
        self.min_df = min_df

    def fit(self, docs: list[LabeledDoc], y: object = None) -> "CharNgramVectorizer":
        self.vocabulary_ = fit_ngrams(docs, self.n_min, self.n_max, self.min_df)
        return self

    def transform(self, docs: list[LabeledDoc]) -> list[SparseBlock]:
        return [vectorize_ngrams(doc, self.vocabulary_) for doc in docs]


def featurize(
    doc: LabeledDoc,
    vocab: NgramVocabulary,
    table: EmbeddingTable,
    scaler: MinMaxScaler,
) -> FeatureVector:
    """Assemble the hybrid feature vector for one document."""
    block = vectorize_ngrams(doc, vocab)
    raw, oov = embed_document(doc.tokens, table)
    return FeatureVector(
        sparse_indices=block.indices,
        sparse_values=block.values,
        dense=scaler.transform_one(raw),
        n_sparse=vocab.size,
        oov_count=oov,
    )
