"""Multilingual short-text classification with one shared linear model.

Character n-gram TF-IDF and pivot-aligned word embeddings feed a
one-vs-rest linear SVM trained on the union of all languages' data.
"""

from .bundle import ModelBundle, build_bundle, load_model, save_model
from .corpus import (
    CANONICAL_LABELS,
    LANGUAGES,
    DatasetSplit,
    LabeledDoc,
    RawRecord,
    normalize_label,
    parse_dataset,
    tokenize,
)
from .embeddings import (
    AlignmentMap,
    EmbeddingTable,
    OrthogonalAligner,
    PseudoDictionary,
    align_all,
    build_pseudo_dictionary,
    embed_document,
    fit_orthogonal_map,
    load_embeddings,
    normalize_rows,
)
from .features import (
    CharNgramVectorizer,
    FeatureVector,
    MinMaxScaler,
    NgramVocabulary,
    apply_minmax,
    featurize,
    fit_minmax,
    fit_ngrams,
    vectorize_ngrams,
)
from .metrics import (
    MetricsReport,
    PredictionSet,
    compute_report,
    exact_accuracy,
    macro_average,
    micro_f1,
    per_label_prf,
    weighted_f1,
)
from .pipeline import MultilingualClassifier
from .svm import (
    LinearModel,
    LinearSVM,
    TrainConfig,
    decision_scores,
    predict,
    train_binary,
    train_ovr,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentMap",
    "CANONICAL_LABELS",
    "CharNgramVectorizer",
    "DatasetSplit",
    "EmbeddingTable",
    "FeatureVector",
    "LANGUAGES",
    "LabeledDoc",
    "LinearModel",
    "LinearSVM",
    "MetricsReport",
    "MinMaxScaler",
    "ModelBundle",
    "MultilingualClassifier",
    "NgramVocabulary",
    "OrthogonalAligner",
    "PredictionSet",
    "PseudoDictionary",
    "RawRecord",
    "TrainConfig",
    "align_all",
    "apply_minmax",
    "build_bundle",
    "build_pseudo_dictionary",
    "compute_report",
    "decision_scores",
    "embed_document",
    "exact_accuracy",
    "featurize",
    "fit_minmax",
    "fit_ngrams",
    "fit_orthogonal_map",
    "load_embeddings",
    "load_model",
    "macro_average",
    "micro_f1",
    "normalize_label",
    "normalize_rows",
    "parse_dataset",
    "per_label_prf",
    "predict",
    "save_model",
    "tokenize",
    "train_binary",
    "train_ovr",
    "vectorize_ngrams",
    "weighted_f1",
]
