from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone

from crosstext.corpus import LabeledDoc
from crosstext.embeddings import align_all, normalize_rows
from crosstext.errors import DataError, UsageError
from crosstext.pipeline import MultilingualClassifier


@pytest.fixture(scope="module")
def fitted(toy_fixture):
    tables = {lang: normalize_rows(t) for lang, t in toy_fixture.tables.items()}
    aligned, _ = align_all(tables, "en")
    docs = toy_fixture.train["en"] + toy_fixture.train["es"]
    clf = MultilingualClassifier(n_max=5, seed=3).fit(docs, tables=aligned)
    return clf, docs, aligned


def test_training_set_is_reproduced(fitted):
    clf, docs, _ = fitted
    predictions = clf.predict(docs)
    gold = [d.label for d in docs]
    agreement = np.mean([p == g for p, g in zip(predictions, gold)])
    assert agreement == 1.0


def test_one_weight_matrix_for_all_languages(fitted):
    clf, docs, _ = fitted
    assert clf.svm_.model_.weights.shape[0] == 5
    languages = {d.language for d in docs}
    assert languages == {"en", "es"}  # both served by the same weights


def test_decision_function_shape(fitted):
    clf, docs, _ = fitted
    scores = clf.decision_function(docs[:7])
    assert scores.shape == (7, 5)


def test_transfers_to_unseen_language_documents(fitted, toy_fixture):
    clf, _, _ = fitted
    test_docs = toy_fixture.test["es"]
    accuracy = np.mean([p == d.label for p, d in zip(clf.predict(test_docs), test_docs)])
    assert accuracy > 0.8


def test_get_params_and_clone():
    clf = MultilingualClassifier(n_min=2, n_max=4, C=1.0, seed=5)
    params = clf.get_params()
    assert params["n_min"] == 2 and params["C"] == 1.0
    assert clone(clf).get_params() == params


def test_fit_requires_tables(toy_fixture):
    with pytest.raises(UsageError):
        MultilingualClassifier().fit(toy_fixture.train["en"])


def test_fit_rejects_unlabeled_docs(toy_fixture):
    tables = {"en": normalize_rows(toy_fixture.tables["en"])}
    docs = [LabeledDoc(id="u", language="en", tokens=["sh000"], label=None)]
    with pytest.raises(DataError):
        MultilingualClassifier().fit(docs, tables=tables)


def test_fit_rejects_doc_language_without_table(toy_fixture):
    tables = {"en": normalize_rows(toy_fixture.tables["en"])}
    docs = toy_fixture.train["es"][:3]
    with pytest.raises(UsageError, match="es"):
        MultilingualClassifier().fit(docs, tables=tables)


def test_explicit_labels_override_doc_labels(toy_fixture):
    tables = {"en": normalize_rows(toy_fixture.tables["en"])}
    docs = toy_fixture.train["en"][:10]
    y = ["request"] * len(docs)
    clf = MultilingualClassifier(n_max=4).fit(docs, y=y, tables=tables)
    assert set(clf.predict(docs)) == {"request"}


def test_scaler_and_weights_live_on_f32_grid(fitted):
    clf, _, _ = fitted
    weights = clf.svm_.model_.weights
    assert np.array_equal(weights, weights.astype(np.float32).astype(np.float64))
    mins = clf.scaler_.mins_
    assert np.array_equal(mins, mins.astype(np.float32).astype(np.float64))
