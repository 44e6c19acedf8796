"""One-vs-rest L2-regularized hinge-loss linear classifier.

Each binary problem minimizes f(w) = 1/2 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)
with the bias folded in as an always-on feature of value ``bias_scale``,
regularized together with w. The solver is dual coordinate descent over
alpha_i in [0, C]: one pass visits every sample in a seeded random
permutation, updates alpha_i in closed form, and maintains the primal w
incrementally. Training stops when the largest projected-gradient violation
seen in an epoch drops below ``tol``, or at ``max_epochs``.

Rows are canonicalized to (indices, nonzero values) before solving, so
training on FeatureVectors and on their densified concatenations follows
the exact same arithmetic and yields bit-identical weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .corpus import CANONICAL_LABELS
from .errors import NumericError, UnknownLabelError
from .features import FeatureVector

Row = tuple[np.ndarray, np.ndarray]


@dataclass
class TrainConfig:
    C: float = 10.0
    tol: float = 1e-4
    max_epochs: int = 1000
    seed: int = 0
    bias_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.C <= 0 or self.tol <= 0 or self.max_epochs < 1:
            raise ValueError("need C > 0, tol > 0 and max_epochs >= 1")


@dataclass
class LinearModel:
    """One weight row per canonical class; the last column is the bias."""

    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, n_features + 1)
    n_features: int
    bias_scale: float
    present: tuple[bool, ...]  # classes seen in training; others never win


@dataclass
class SolverResult:
    w: np.ndarray
    alpha: np.ndarray
    epochs: int
    dual_objectives: list[float]
    converged: bool


def _canonical_row(x: FeatureVector | np.ndarray) -> tuple[Row, int]:
    """Reduce one sample to (indices, nonzero values) plus its width."""
    if isinstance(x, FeatureVector):
        dense_nz = np.nonzero(x.dense)[0]
        indices = np.concatenate(
            [x.sparse_indices, x.n_sparse + dense_nz]
        ).astype(np.int64)
        values = np.concatenate([x.sparse_values, x.dense[dense_nz]])
        keep = values != 0.0
        return (indices[keep], values[keep]), x.width
    row = np.asarray(x, dtype=np.float64)
    if row.ndim != 1:
        raise ValueError(f"expected a 1-D sample, got shape {row.shape}")
    nz = np.nonzero(row)[0].astype(np.int64)
    return (nz, row[nz]), row.shape[0]


def _canonical_rows(X) -> tuple[list[Row], int]:
    rows: list[Row] = []
    width: int | None = None
    for x in X:
        row, w = _canonical_row(x)
        if width is None:
            width = w
        elif w != width:
            raise ValueError(f"inconsistent sample widths: {width} vs {w}")
        if not np.isfinite(row[1]).all():
            raise NumericError("non-finite feature values")
        rows.append(row)
    if width is None:
        raise ValueError("need at least one training sample")
    return rows, width


def _with_bias(rows: list[Row], n_features: int, bias_scale: float) -> list[Row]:
    if bias_scale == 0.0:
        return rows
    bias_idx = np.array([n_features], dtype=np.int64)
    bias_val = np.array([bias_scale])
    return [
        (np.concatenate([idx, bias_idx]), np.concatenate([val, bias_val]))
        for idx, val in rows
    ]


def _solve(
    rows: list[Row],
    y: np.ndarray,
    n_weights: int,
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> SolverResult:
    n = len(rows)
    w = np.zeros(n_weights)
    alpha = np.zeros(n)
    q_diag = np.array([val @ val for _, val in rows])
    C = cfg.C
    history: list[float] = []
    converged = False
    epochs = 0
    for _ in range(cfg.max_epochs):
        epochs += 1
        max_violation = 0.0
        for i in rng.permutation(n):
            idx, val = rows[i]
            yi = y[i]
            G = yi * (w[idx] @ val) - 1.0
            a = alpha[i]
            if a == 0.0:
                PG = G if G < 0.0 else 0.0
            elif a == C:
                PG = G if G > 0.0 else 0.0
            else:
                PG = G
            if PG != 0.0:
                violation = abs(PG)
                if violation > max_violation:
                    max_violation = violation
                if q_diag[i] > 0.0:
                    new = min(max(a - G / q_diag[i], 0.0), C)
                else:
                    # Zero row: alpha does not touch w; park it at the
                    # bound its gradient points to so it stops violating.
                    new = C if G < 0.0 else 0.0
                if new != a:
                    alpha[i] = new
                    w[idx] += ((new - a) * yi) * val
        history.append(float(alpha.sum() - 0.5 * (w @ w)))
        if max_violation < cfg.tol:
            converged = True
            break
    return SolverResult(
        w=w, alpha=alpha, epochs=epochs, dual_objectives=history, converged=converged
    )


def solve_binary(X, y, cfg: TrainConfig) -> SolverResult:
    """Run the dual solver on one binary problem; exposes solver internals."""
    y = np.asarray(y, dtype=np.float64)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be +1/-1")
    rows, n_features = _canonical_rows(X)
    if len(rows) != len(y):
        raise ValueError(f"{len(rows)} samples but {len(y)} labels")
    rows = _with_bias(rows, n_features, cfg.bias_scale)
    rng = np.random.default_rng(cfg.seed)
    return _solve(rows, y, n_features + 1, cfg, rng)


def train_binary(X, y, cfg: TrainConfig) -> np.ndarray:
    """Fit one binary problem; returns the (n_features + 1) weight vector."""
    return solve_binary(X, y, cfg).w


def primal_objective(X, y, w: np.ndarray, cfg: TrainConfig) -> float:
    """1/2 ||w||^2 + C sum_i hinge(y_i, w.x_hat_i) for diagnostics/tests."""
    y = np.asarray(y, dtype=np.float64)
    rows, n_features = _canonical_rows(X)
    rows = _with_bias(rows, n_features, cfg.bias_scale)
    hinge = 0.0
    for (idx, val), yi in zip(rows, y):
        hinge += max(0.0, 1.0 - yi * (w[idx] @ val))
    return 0.5 * float(w @ w) + cfg.C * hinge


def train_ovr(X, labels, cfg: TrainConfig) -> LinearModel:
    """Train one binary scorer per canonical class present in ``labels``.

    Classes absent from training get an all-zero row and are excluded from
    the argmax at prediction time, so they can never win. Given the same
    seed the result is bit-identical across runs.
    """
    labels = list(labels)
    for label in labels:
        if label not in CANONICAL_LABELS:
            raise UnknownLabelError(f"unknown label {label!r}")
    rows, n_features = _canonical_rows(X)
    if len(rows) != len(labels):
        raise ValueError(f"{len(rows)} samples but {len(labels)} labels")
    rows = _with_bias(rows, n_features, cfg.bias_scale)
    seen = set(labels)
    weights = np.zeros((len(CANONICAL_LABELS), n_features + 1))
    present = []
    for k, cls in enumerate(CANONICAL_LABELS):
        if cls in seen:
            y = np.array([1.0 if lab == cls else -1.0 for lab in labels])
            rng = np.random.default_rng([cfg.seed, k])
            weights[k] = _solve(rows, y, n_features + 1, cfg, rng).w
            present.append(True)
        else:
            present.append(False)
    return LinearModel(
        classes=CANONICAL_LABELS,
        weights=weights,
        n_features=n_features,
        bias_scale=cfg.bias_scale,
        present=tuple(present),
    )


def decision_scores(model: LinearModel, x: FeatureVector | np.ndarray) -> np.ndarray:
    """Per-class scores w_k . x_hat, bias included via ``bias_scale``."""
    (idx, val), width = _canonical_row(x)
    if width != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {width}")
    return model.weights[:, idx] @ val + model.weights[:, model.n_features] * model.bias_scale


def predict(model: LinearModel, x: FeatureVector | np.ndarray) -> str:
    """Argmax over the scores of trained classes, first class wins ties."""
    scores = decision_scores(model, x)
    best: int | None = None
    for k in range(len(model.classes)):
        if not model.present[k]:
            continue
        if best is None or scores[k] > scores[best]:
            best = k
    if best is None:
        raise ValueError("model has no trained classes")
    return model.classes[best]


class LinearSVM(BaseEstimator, ClassifierMixin):
    """Sklearn-style front to the one-vs-rest dual coordinate descent SVM."""

    def __init__(
        self,
        C: float = 10.0,
        tol: float = 1e-4,
        max_epochs: int = 1000,
        seed: int = 0,
        bias_scale: float = 1.0,
    ):
        self.C = C
        self.tol = tol
        self.max_epochs = max_epochs
        self.seed = seed
        self.bias_scale = bias_scale

    def _config(self) -> TrainConfig:
        return TrainConfig(
            C=self.C,
            tol=self.tol,
            max_epochs=self.max_epochs,
            seed=self.seed,
            bias_scale=self.bias_scale,
        )

    def fit(self, X, y) -> "LinearSVM":
        self.model_ = train_ovr(X, list(y), self._config())
        self.classes_ = np.array(self.model_.classes)
        return self

    def decision_function(self, X) -> np.ndarray:
        return np.vstack([decision_scores(self.model_, x) for x in X])

    def predict(self, X) -> np.ndarray:
        return np.array([predict(self.model_, x) for x in X])
