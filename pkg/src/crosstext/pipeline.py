"""End-to-end classifier: hybrid features over any number of languages.

One fitted instance holds exactly one weight matrix regardless of how many
languages it was trained on; the per-language part is confined to the
embedding tables, which must already live in a shared space (see
:mod:`crosstext.embeddings`). Documents from all training languages are
pooled for the n-gram vocabulary, the scaler and the SVM.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .bundle import to_f32_grid
from .corpus import LabeledDoc
from .embeddings import EmbeddingTable, embed_document
from .errors import DataError, UsageError
from .features import CharNgramVectorizer, FeatureVector, MinMaxScaler, featurize
from .svm import LinearSVM, decision_scores, predict as predict_label


class MultilingualClassifier(BaseEstimator, ClassifierMixin):
    """Char n-gram TF-IDF + scaled aligned embeddings into a linear SVM.

    Fitted parameters are snapped to the float32 grid so that saving a
    model bundle is lossless.
    """

    def __init__(
        self,
        n_min: int = 3,
        n_max: int = 10,
        min_df: int = 1,
        C: float = 10.0,
        tol: float = 1e-4,
        max_epochs: int = 1000,
        seed: int = 0,
        bias_scale: float = 1.0,
    ):
        self.n_min = n_min
        self.n_max = n_max
        self.min_df = min_df
        self.C = C
        self.tol = tol
        self.max_epochs = max_epochs
        self.seed = seed
        self.bias_scale = bias_scale

    def _table_for(self, doc: LabeledDoc) -> EmbeddingTable:
        table = self.tables_.get(doc.language)
        if table is None:
            raise UsageError(
                f"no embedding table for language {doc.language!r} "
                f"(have: {', '.join(sorted(self.tables_))})"
            )
        return table

    def fit(
        self,
        docs: list[LabeledDoc],
        y: list[str] | None = None,
        tables: dict[str, EmbeddingTable] | None = None,
    ) -> "MultilingualClassifier":
        """Fit vocabulary, scaler and SVM on the pooled documents.

        ``tables`` maps each training language to its row-normalized,
        aligned embedding table. Labels default to ``doc.label``.
        """
        if not docs:
            raise DataError("no training documents")
        if tables is None:
            raise UsageError("fit() needs per-language embedding tables")
        self.tables_ = tables
        if y is None:
            y = []
            for doc in docs:
                if doc.label is None:
                    raise DataError(f"training document {doc.id!r} has no label")
                y.append(doc.label)

        self.vectorizer_ = CharNgramVectorizer(
            n_min=self.n_min, n_max=self.n_max, min_df=self.min_df
        ).fit(docs)

        raw = np.vstack([embed_document(d.tokens, self._table_for(d))[0] for d in docs])
        self.scaler_ = MinMaxScaler().fit(raw)
        self.scaler_.mins_ = to_f32_grid(self.scaler_.mins_)
        self.scaler_.maxs_ = to_f32_grid(self.scaler_.maxs_)

        features = [self.featurize_doc(doc) for doc in docs]
        self.svm_ = LinearSVM(
            C=self.C,
            tol=self.tol,
            max_epochs=self.max_epochs,
            seed=self.seed,
            bias_scale=self.bias_scale,
        ).fit(features, y)
        self.svm_.model_.weights = to_f32_grid(self.svm_.model_.weights)
        self.classes_ = self.svm_.classes_
        return self

    def featurize_doc(self, doc: LabeledDoc) -> FeatureVector:
        return featurize(
            doc, self.vectorizer_.vocabulary_, self._table_for(doc), self.scaler_
        )

    def decision_function(self, docs: list[LabeledDoc]) -> np.ndarray:
        return np.vstack(
            [decision_scores(self.svm_.model_, self.featurize_doc(d)) for d in docs]
        )

    def predict(self, docs: list[LabeledDoc]) -> np.ndarray:
        return np.array(
            [predict_label(self.svm_.model_, self.featurize_doc(d)) for d in docs]
        )
