"""Comparison classifiers: multinomial Naive Bayes, k-nearest neighbors,
truncated (unpenalized) logistic regression, and a linear hinge-loss SVM
trained by deterministic-shuffle stochastic subgradient descent.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import sparse

from .corpus import FREQUENCY, NEGATIVE, POSITIVE, DocumentTermMatrix, truncate_by_sparsity
from .errors import (
    DegenerateDesignError,
    DegenerateLabelsError,
    InsufficientDataError,
    NumericalError,
    ParameterError,
)
from .penalty import ScadParams
from .solver import Design, FitOptions, ScadModel, _check_labels, _unpack_design, fit

log = logging.getLogger(__name__)

LR_COEF_CAP = 30.0


# ---------------------------------------------------------------------------
# Naive Bayes

@dataclass
class NbModel:
    class_log_priors: np.ndarray  # [negative, positive]
    term_log_likelihoods: np.ndarray  # shape (2, p), rows sum to 1 in prob space
    smoothing: float
    vocabulary: list[str]


def nb_fit(dtm: DocumentTermMatrix, labels, smoothing: float = 1.0) -> NbModel:
    """Multinomial NB over raw counts with additive smoothing."""
    if dtm.weighting != FREQUENCY:
        raise ParameterError("naive Bayes expects a frequency-weighted matrix")
    if smoothing <= 0:
        raise ParameterError("smoothing must be positive")
    y = _check_labels(labels, dtm.n_docs, require_both_classes=True)
    mat = dtm.matrix
    p = mat.shape[1]
    counts = np.vstack(
        [
            np.asarray(mat[y == 0].sum(axis=0)).ravel(),
            np.asarray(mat[y == 1].sum(axis=0)).ravel(),
        ]
    )
    totals = counts.sum(axis=1, keepdims=True)
    log_lik = np.log(counts + smoothing) - np.log(totals + smoothing * p)
    n_neg, n_pos = float((y == 0).sum()), float((y == 1).sum())
    priors = np.log(np.array([n_neg, n_pos]) / (n_neg + n_pos))
    return NbModel(
        class_log_priors=priors,
        term_log_likelihoods=log_lik,
        smoothing=smoothing,
        vocabulary=list(dtm.vocabulary),
    )


def nb_log_posteriors(model: NbModel, row) -> np.ndarray:
    """Unnormalized log posterior for [negative, positive]."""
    if sparse.issparse(row):
        row = np.asarray(row.todense()).ravel()
    row = np.asarray(row, dtype=np.float64).ravel()
    return model.class_log_priors + model.term_log_likelihoods @ row


def nb_predict(model: NbModel, row) -> str:
    neg, pos = nb_log_posteriors(model, row)
    return POSITIVE if pos >= neg else NEGATIVE


def nb_predict_matrix(model: NbModel, X: Design) -> np.ndarray:
    mat, _, _ = _unpack_design(X)
    scores = mat @ model.term_log_likelihoods.T + model.class_log_priors
    return (scores[:, 1] >= scores[:, 0]).astype(np.int64)


# ---------------------------------------------------------------------------
# K-nearest neighbors

@dataclass(frozen=True)
class KnnConfig:
    k: int = 5
    row_normalization: str = "l2"

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError("k must be >= 1")
        if self.row_normalization not in ("l2", "none"):
            raise ParameterError("row_normalization must be 'l2' or 'none'")


def _l2_normalize(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return mat / norms


def _dense(X: Design) -> np.ndarray:
    mat, _, _ = _unpack_design(X)
    return np.asarray(mat.todense())


def knn_predict(train: Design, train_labels, query_row, config: KnnConfig) -> str:
    """Majority vote among the k nearest training rows by Euclidean distance.
    A tied vote falls to the single nearest neighbor; tied distances prefer
    the lower row index."""
    votes = knn_predict_matrix(train, train_labels, np.atleast_2d(
        np.asarray(query_row.todense()).ravel() if sparse.issparse(query_row)
        else np.asarray(query_row, dtype=np.float64).ravel()
    ), config)
    return POSITIVE if votes[0] == 1 else NEGATIVE


def knn_predict_matrix(
    train: Design, train_labels, queries, config: KnnConfig
) -> np.ndarray:
    X = _dense(train)
    if X.shape[0] == 0:
        raise InsufficientDataError("empty training set")
    if config.k > X.shape[0]:
        raise ParameterError(f"k={config.k} exceeds training size {X.shape[0]}")
    y = _check_labels(train_labels, X.shape[0]).astype(np.int64)
    Q = np.atleast_2d(
        np.asarray(queries.todense()) if sparse.issparse(queries)
        else np.asarray(queries, dtype=np.float64)
    )
    if config.row_normalization == "l2":
        X = _l2_normalize(X)
        Q = _l2_normalize(Q)
    out = np.empty(Q.shape[0], dtype=np.int64)
    for i in range(Q.shape[0]):
        dist = np.sqrt(((X - Q[i]) ** 2).sum(axis=1))
        order = np.argsort(dist, kind="stable")[: config.k]
        votes = y[order]
        pos = int(votes.sum())
        neg = config.k - pos
        if pos > neg:
            out[i] = 1
        elif neg > pos:
            out[i] = 0
        else:
            out[i] = votes[0]
    return out


def select_knn_k(
    train: Design,
    labels,
    k_grid: Sequence[int] = tuple(range(1, 26, 2)),
    folds: int = 5,
    seed: int = 0,
) -> int:
    """Pick k by cross-validated misclassification; ties prefer smaller k."""
    from .model_selection import kfold_split

    X = _dense(train)
    y = _check_labels(labels, X.shape[0])
    assignment = kfold_split(X.shape[0], folds, seed, labels=y)
    best_k, best_err = None, None
    for k in k_grid:
        errors, count = 0.0, 0
        for f in range(folds):
            test = assignment == f
            train_mask = ~test
            if train_mask.sum() < k or len(np.unique(y[train_mask])) < 2:
                continue
            preds = knn_predict_matrix(
                X[train_mask], y[train_mask], X[test], KnnConfig(k=k)
            )
            errors += float((preds != y[test]).sum())
            count += int(test.sum())
        if count == 0:
            continue
        err = errors / count
        if best_err is None or err < best_err:
            best_k, best_err = k, err
    if best_k is None:
        raise DegenerateLabelsError("no usable folds for knn selection")
    return best_k


# ---------------------------------------------------------------------------
# Truncated logistic regression

def truncated_lr_fit(
    dtm: DocumentTermMatrix,
    labels,
    sparsity_threshold: float,
    options: Optional[FitOptions] = None,
) -> ScadModel:
    """Drop rare terms, then fit unpenalized logistic regression (lam = 0).
    Separable or singular fits surface as converged=False with coefficients
    capped at +-30."""
    truncated = truncate_by_sparsity(dtm, sparsity_threshold)
    p = truncated.n_terms
    if p < 1 or p >= truncated.n_docs:
        raise DegenerateDesignError(
            f"singular fit: {p} surviving features for {truncated.n_docs} documents"
        )
    options = options or FitOptions(max_abs_coef=LR_COEF_CAP)
    model = fit(truncated, labels, ScadParams(lam=0.0), options)
    beta = model.dense_coefficients()
    if beta.size and np.abs(beta).max() >= options.max_abs_coef - 1e-9:
        log.warning("truncated LR hit the coefficient cap; flagging non-convergence")
        model.converged = False
    return model


# ---------------------------------------------------------------------------
# Linear SVM

@dataclass
class SvmModel:
    weights: np.ndarray
    bias: float
    cost: float
    vocabulary: list[str]


def svm_objective(weights: np.ndarray, bias: float, X, y_pm, cost: float) -> float:
    """Primal objective: ||w||^2 / 2 + C * sum hinge."""
    margins = y_pm * (X @ weights + bias)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float(0.5 * weights @ weights + cost * hinge.sum())


def to_pm_labels(labels) -> np.ndarray:
    """Map 0/1 labels onto -1/+1 (already-signed input passes through)."""
    arr = np.asarray(labels)
    if np.isin(arr, (-1, 1)).all():
        return arr.astype(np.float64)
    return (2 * _check_labels(arr, arr.shape[0]) - 1).astype(np.float64)


def svm_fit(
    X: Design,
    labels,
    cost: float = 1.0,
    epochs: int = 200,
    seed: int = 0,
) -> SvmModel:
    """Stochastic subgradient descent on the primal hinge objective with a
    deterministic per-epoch shuffle; returns the tail-averaged iterate."""
    if cost <= 0:
        raise ParameterError("cost must be positive")
    mat, vocabulary, _ = _unpack_design(X)
    dense = np.asarray(mat.todense())
    n, p = dense.shape
    y = to_pm_labels(labels)
    if y.shape[0] != n:
        raise ParameterError("labels length disagrees with matrix")
    if np.unique(y).size < 2:
        raise DegenerateLabelsError("both classes must be present")

    lam = 1.0 / (n * cost)
    rng = np.random.default_rng(seed)
    w = np.zeros(p)
    b = 0.0
    total_steps = epochs * n
    t0 = n  # schedule offset tames the very first steps
    avg_w = np.zeros(p)
    avg_b = 0.0
    n_avg = 0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * (t + t0))
            margin = y[i] * (dense[i] @ w + b)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * y[i] * dense[i]
                b += eta * y[i]
            if t > total_steps // 2:
                avg_w += w
                avg_b += b
                n_avg += 1
    if n_avg:
        w, b = avg_w / n_avg, avg_b / n_avg
    if not (np.isfinite(w).all() and np.isfinite(b)):
        raise NumericalError("SVM training diverged; adjust cost or epochs")
    obj = svm_objective(w, b, dense, y, cost)
    if not np.isfinite(obj):
        raise NumericalError("SVM objective is not finite")
    return SvmModel(weights=w, bias=float(b), cost=cost, vocabulary=vocabulary)


def svm_decision(model: SvmModel, row) -> float:
    if sparse.issparse(row):
        row = np.asarray(row.todense()).ravel()
    return float(np.asarray(row, dtype=np.float64).ravel() @ model.weights + model.bias)


def svm_predict(model: SvmModel, row) -> str:
    return POSITIVE if svm_decision(model, row) >= 0 else NEGATIVE


def svm_predict_matrix(model: SvmModel, X: Design) -> np.ndarray:
    mat, _, _ = _unpack_design(X)
    return (mat @ model.weights + model.bias >= 0).astype(np.int64)


def svm_cost_grid(num: int = 7) -> np.ndarray:
    """Log-spaced cost values spanning 0.1 to 100."""
    return np.logspace(-1, 2, num)


def select_svm_cost(
    X: Design,
    labels,
    costs: Optional[Sequence[float]] = None,
    folds: int = 5,
    seed: int = 0,
    epochs: int = 100,
) -> float:
    """Pick C by cross-validated misclassification; ties prefer smaller C."""
    from .model_selection import kfold_split

    mat, _, _ = _unpack_design(X)
    y = _check_labels(labels, mat.shape[0])
    costs = svm_cost_grid() if costs is None else list(costs)
    assignment = kfold_split(mat.shape[0], folds, seed, labels=y)
    best_cost, best_err = None, None
    for cost in costs:
        errors, count = 0.0, 0
        for f in range(folds):
            test = assignment == f
            train = ~test
            if len(np.unique(y[train])) < 2:
                continue
            model = svm_fit(mat[train], y[train], cost=cost, epochs=epochs, seed=seed)
            preds = svm_predict_matrix(model, mat[test])
            errors += float((preds != y[test]).sum())
            count += int(test.sum())
        if count == 0:
            continue
        err = errors / count
        if best_err is None or err < best_err:
            best_cost, best_err = float(cost), err
    if best_cost is None:
        raise DegenerateLabelsError("no usable folds for cost selection")
    return best_cost
