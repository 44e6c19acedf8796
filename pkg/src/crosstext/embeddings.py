"""Per-language embedding tables and their alignment into a shared space.

Alignment needs no parallel data: the shared word types between a language
and the pivot form a pseudo-dictionary, and the orthogonal map that best
carries the language's dictionary vectors onto the pivot's is the closed-form
solution of the orthogonal Procrustes problem (SVD of the cross-covariance).
Every non-pivot language is mapped pairwise onto the pivot, so all spaces
become mutually comparable.

Embedding file format: UTF-8 text, optional first header line
``<count> <dim>`` (detected as a line with exactly 2 integer fields), then
one ``word v1 v2 ... vdim`` line per vector, space-separated decimal floats.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import (
    DataError,
    EmbeddingFormatError,
    InsufficientDictionaryError,
    NumericError,
    UsageError,
)

# Unit rows are left untouched by normalize_rows, which makes it exactly
# idempotent in floating point.
_UNIT_NORM_TOL = 1e-12


@dataclass
class EmbeddingTable:
    """Vocabulary-indexed dense vector matrix for one language."""

    language: str
    dim: int
    vocab: tuple[str, ...]
    matrix: np.ndarray
    dropped_duplicates: int = 0
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._index = {word: i for i, word in enumerate(self.vocab)}

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def row(self, word: str) -> np.ndarray:
        return self.matrix[self._index[word]]

    @property
    def index(self) -> dict[str, int]:
        return self._index


@dataclass
class PseudoDictionary:
    """Row-index pairs for word types spelled identically in two tables."""

    pairs: list[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class AlignmentMap:
    """Orthogonal matrix projecting one language's space onto the pivot's."""

    source_language: str
    pivot_language: str
    W: np.ndarray
    n_pairs: int = 0


def load_embeddings(path: str | Path, language: str) -> EmbeddingTable:
    """Load a text-format embedding table.

    Duplicate words keep their first occurrence; the number dropped is
    reported as a warning and recorded on the table.
    """
    path = Path(path)
    vocab: list[str] = []
    rows: list[np.ndarray] = []
    seen: dict[str, int] = {}
    duplicates = 0
    dim: int | None = None

    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()

    start = 0
    if lines:
        first = lines[0].split()
        if len(first) == 2:
            try:
                int(first[0]), int(first[1])
            except ValueError:
                pass
            else:
                dim = int(first[1])
                start = 1

    for lineno, line in enumerate(lines[start:], start=start + 1):
        fields = line.split()
        if not fields:
            continue
        word, values = fields[0], fields[1:]
        if dim is None:
            dim = len(values)
        if len(values) != dim:
            raise EmbeddingFormatError(
                f"{path.name} line {lineno}: expected {dim} values, got {len(values)}"
            )
        try:
            vector = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError:
            raise EmbeddingFormatError(
                f"{path.name} line {lineno}: non-numeric vector component"
            ) from None
        if word in seen:
            duplicates += 1
            continue
        seen[word] = len(vocab)
        vocab.append(word)
        rows.append(vector)

    if not vocab or dim is None or dim == 0:
        raise EmbeddingFormatError(f"{path.name}: empty vocabulary")
    matrix = np.vstack(rows)
    if not np.isfinite(matrix).all():
        raise EmbeddingFormatError(f"{path.name}: non-finite vector components")
    if duplicates:
        warnings.warn(
            f"{path.name}: ignored {duplicates} duplicate words (kept first occurrence)"
        )
    return EmbeddingTable(
        language=language,
        dim=dim,
        vocab=tuple(vocab),
        matrix=matrix,
        dropped_duplicates=duplicates,
    )


def normalize_rows(table: EmbeddingTable) -> EmbeddingTable:
    """Scale every row to unit Euclidean norm; all-zero rows stay zero."""
    norms = np.linalg.norm(table.matrix, axis=1)
    scale = np.ones_like(norms)
    needs = (norms > 0) & (np.abs(norms - 1.0) > _UNIT_NORM_TOL)
    scale[needs] = 1.0 / norms[needs]
    return EmbeddingTable(
        language=table.language,
        dim=table.dim,
        vocab=table.vocab,
        matrix=table.matrix * scale[:, None],
        dropped_duplicates=table.dropped_duplicates,
    )


def build_pseudo_dictionary(
    src: EmbeddingTable, tgt: EmbeddingTable, cap: int | None = None
) -> PseudoDictionary:
    """Pair up word types spelled identically (byte equality) in both vocabs.

    Pairs follow source-vocabulary order; ``cap`` keeps only the first
    ``cap`` pairs. Fewer than ``dim`` pairs cannot determine a full-rank
    orthogonal map and raise :class:`InsufficientDictionaryError`.
    """
    if src.dim != tgt.dim:
        raise DataError(
            f"dimension mismatch: {src.language} has dim {src.dim}, "
            f"{tgt.language} has dim {tgt.dim}"
        )
    tgt_index = tgt.index
    pairs = [(i, tgt_index[w]) for i, w in enumerate(src.vocab) if w in tgt_index]
    if cap is not None:
        pairs = pairs[:cap]
    if len(pairs) < src.dim:
        raise InsufficientDictionaryError(
            f"{len(pairs)} shared word types between {src.language} and "
            f"{tgt.language}, need at least dim={src.dim}"
        )
    return PseudoDictionary(pairs=pairs)


def fit_orthogonal_map(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Solve the orthogonal Procrustes problem min_W ||XW - Y||_F.

    Returns W = U V^T from the thin SVD U S V^T of X^T Y. W is unique when
    no singular value vanishes; a rank-deficient cross-covariance raises
    :class:`InsufficientDictionaryError` instead of silently proceeding.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or X.shape != Y.shape:
        raise DataError(f"shape mismatch: {X.shape} vs {Y.shape}")
    n, d = X.shape
    if n < d:
        raise InsufficientDictionaryError(f"need at least {d} pairs, got {n}")
    if not (np.isfinite(X).all() and np.isfinite(Y).all()):
        raise NumericError("non-finite values in Procrustes inputs")
    try:
        U, s, Vt = np.linalg.svd(X.T @ Y, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    if s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise InsufficientDictionaryError(
            "rank-deficient dictionary: orthogonal map is not unique"
        )
    return U @ Vt


def align_all(
    tables: dict[str, EmbeddingTable],
    pivot: str,
    cap: int | None = None,
) -> tuple[dict[str, EmbeddingTable], dict[str, AlignmentMap]]:
    """Project every table onto the pivot's space via its pseudo-dictionary.

    The pivot table is returned unchanged with an identity map. Tables are
    expected to be row-normalized beforehand (orthogonal maps preserve the
    normalization).
    """
    if pivot not in tables:
        raise UsageError(f"pivot language {pivot!r} has no embedding table")
    pivot_table = tables[pivot]
    aligned: dict[str, EmbeddingTable] = {pivot: pivot_table}
    maps: dict[str, AlignmentMap] = {
        pivot: AlignmentMap(
            source_language=pivot,
            pivot_language=pivot,
            W=np.eye(pivot_table.dim),
            n_pairs=len(pivot_table),
        )
    }
    for language, table in tables.items():
        if language == pivot:
            continue
        try:
            dictionary = build_pseudo_dictionary(table, pivot_table, cap=cap)
            src_rows = np.array([i for i, _ in dictionary.pairs])
            tgt_rows = np.array([j for _, j in dictionary.pairs])
            W = fit_orthogonal_map(
                table.matrix[src_rows], pivot_table.matrix[tgt_rows]
            )
        except InsufficientDictionaryError as exc:
            raise InsufficientDictionaryError(f"{language}: {exc}") from None
        aligned[language] = EmbeddingTable(
            language=table.language,
            dim=table.dim,
            vocab=table.vocab,
            matrix=table.matrix @ W,
            dropped_duplicates=table.dropped_duplicates,
        )
        maps[language] = AlignmentMap(
            source_language=language,
            pivot_language=pivot,
            W=W,
            n_pairs=len(dictionary),
        )
    return aligned, maps


def embed_document(tokens: list[str], table: EmbeddingTable) -> tuple[np.ndarray, int]:
    """Mean of the vectors of in-vocabulary tokens, plus the OOV count.

    Tokens outside the vocabulary are skipped; with no in-vocabulary token
    the zero vector is returned. Summation runs in sorted row order so the
    result is bit-identical under any permutation of the token list.
    """
    index = table.index
    rows = sorted(index[t] for t in tokens if t in index)
    oov = len(tokens) - len(rows)
    if not rows:
        return np.zeros(table.dim), oov
    total = table.matrix[np.array(rows)].sum(axis=0)
    return total / len(rows), oov


class OrthogonalAligner(BaseEstimator, TransformerMixin):
    """Estimator wrapper around the closed-form orthogonal map.

    ``fit(X, Y)`` learns the orthogonal ``W_`` minimizing ||XW - Y||_F over
    paired rows; ``transform(X)`` applies it.
    """

    def fit(self, X: np.ndarray, Y: np.ndarray) -> "OrthogonalAligner":
        self.W_ = fit_orthogonal_map(X, Y)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.W_
