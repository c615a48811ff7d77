"""K-fold cross-validation and the (K, gamma, lambda) grid search.

The cross-validated loss is the held-out mean negative log-likelihood,
pooled over every held-out point. One seed drives the fold assignment for
every K so grid entries stay comparable.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import DegenerateLabelsError, ParameterError
from .penalty import ScadParams
from .solver import (
    Design,
    FitOptions,
    PROB_CLAMP,
    _check_labels,
    _unpack_design,
    fit,
    fit_path,
    lambda_path,
)

log = logging.getLogger(__name__)


def kfold_split(n: int, K: int, seed: int, labels=None) -> np.ndarray:
    """Fold index per row; sizes differ by at most one. When labels are
    given, folds are stratified so each class spreads evenly."""
    if K < 2 or K > n:
        raise ParameterError(f"K must lie in [2, {n}], got {K}")
    rng = np.random.default_rng(seed)
    if labels is None:
        order = rng.permutation(n)
    else:
        labels = np.asarray(labels)
        if labels.shape[0] != n:
            raise ParameterError("labels length disagrees with n")
        pos = rng.permutation(np.flatnonzero(labels == 1))
        neg = rng.permutation(np.flatnonzero(labels != 1))
        order = np.concatenate([pos, neg])
    assignment = np.empty(n, dtype=np.int64)
    assignment[order] = np.arange(n) % K
    return assignment


def _holdout_nll(eta: np.ndarray, y: np.ndarray) -> np.ndarray:
    pi = np.clip(expit(eta), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return -(y * np.log(pi) + (1.0 - y) * np.log(1.0 - pi))


def _misclassification(eta: np.ndarray, y: np.ndarray) -> np.ndarray:
    return ((eta >= 0).astype(np.float64) != y).astype(np.float64)


_LOSSES = {"nll": _holdout_nll, "misclassification": _misclassification}


def cv_error(
    X: Design,
    y,
    K: int,
    params: ScadParams,
    options: Optional[FitOptions] = None,
    seed: int = 0,
    loss: str = "nll",
) -> float:
    """Mean held-out loss over all points, fitting on each fold complement."""
    mat, _, _ = _unpack_design(X)
    yf = _check_labels(y, mat.shape[0])
    folds = kfold_split(mat.shape[0], K, seed, labels=yf)
    loss_fn = _LOSSES[loss]
    total, count = 0.0, 0
    for k in range(K):
        test = folds == k
        train = ~test
        y_train = yf[train]
        if y_train.min() == y_train.max():
            log.warning("fold %d skipped: training data single-class", k)
            continue
        model = fit(mat[train], y_train, params, options)
        eta = mat[test] @ model.dense_coefficients() + model.intercept
        losses = loss_fn(eta, yf[test])
        total += float(losses.sum())
        count += losses.size
    if count == 0:
        raise DegenerateLabelsError("every fold was skipped")
    return total / count


@dataclass(frozen=True)
class CvGrid:
    k_values: tuple = tuple(range(5, 21))
    gamma_values: tuple = tuple(round(2.1 + 0.1 * i, 1) for i in range(20))
    n_lambdas: int = 30
    lambda_ratio: float = 0.01

    def __post_init__(self):
        if not self.k_values or not self.gamma_values:
            raise ParameterError("grid must be nonempty")
        if any(k < 2 for k in self.k_values):
            raise ParameterError("every K must be >= 2")
        if any(g <= 2 for g in self.gamma_values):
            raise ParameterError("every gamma must exceed 2")


@dataclass
class CvEntry:
    k: int
    gamma: float
    lam: float
    mean_error: float
    fold_errors: list[float]
    fold_sizes: list[int]
    n_skipped: int = 0


@dataclass
class CvReport:
    entries: list[CvEntry]
    best: CvEntry
    seed: int = 0
    loss: str = "nll"


def _better(candidate: CvEntry, incumbent: CvEntry) -> bool:
    """Smaller error wins; ties prefer larger lambda, smaller gamma, smaller K."""
    a = (candidate.mean_error, -candidate.lam, candidate.gamma, candidate.k)
    b = (incumbent.mean_error, -incumbent.lam, incumbent.gamma, incumbent.k)
    return a < b


def grid_search(
    X: Design,
    y,
    grid: Optional[CvGrid] = None,
    options: Optional[FitOptions] = None,
    seed: int = 0,
    loss: str = "nll",
) -> CvReport:
    """Evaluate every (K, gamma) against the warm-started lambda path."""
    grid = grid or CvGrid()
    mat, _, _ = _unpack_design(X)
    yf = _check_labels(y, mat.shape[0])
    lambdas = lambda_path(mat, yf, grid.n_lambdas, grid.lambda_ratio)
    loss_fn = _LOSSES[loss]

    entries: list[CvEntry] = []
    for K in grid.k_values:
        folds = kfold_split(mat.shape[0], K, seed, labels=yf)
        for gamma in grid.gamma_values:
            per_lam_errors = [[] for _ in lambdas]
            per_lam_sizes = [[] for _ in lambdas]
            n_skipped = 0
            for k in range(K):
                test = folds == k
                train = ~test
                y_train = yf[train]
                if y_train.min() == y_train.max():
                    n_skipped += 1
                    log.warning("K=%d fold %d skipped: single-class", K, k)
                    continue
                models = fit_path(mat[train], y_train, lambdas, gamma, options)
                X_test, y_test = mat[test], yf[test]
                for i, model in enumerate(models):
                    eta = X_test @ model.dense_coefficients() + model.intercept
                    per_lam_errors[i].append(float(loss_fn(eta, y_test).mean()))
                    per_lam_sizes[i].append(int(y_test.size))
            if n_skipped == K:
                raise DegenerateLabelsError(f"every fold skipped for K={K}")
            for i, lam in enumerate(lambdas):
                sizes = np.array(per_lam_sizes[i], dtype=np.float64)
                means = np.array(per_lam_errors[i], dtype=np.float64)
                entries.append(
                    CvEntry(
                        k=int(K),
                        gamma=float(gamma),
                        lam=float(lam),
                        mean_error=float((means * sizes).sum() / sizes.sum()),
                        fold_errors=[float(e) for e in per_lam_errors[i]],
                        fold_sizes=[int(s) for s in per_lam_sizes[i]],
                        n_skipped=n_skipped,
                    )
                )

    best = entries[0]
    for entry in entries[1:]:
        if _better(entry, best):
            best = entry
    entries.sort(key=lambda e: (e.k, e.gamma, -e.lam))
    return CvReport(entries=entries, best=best, seed=seed, loss=loss)


def one_se_lambda(report: CvReport, k: Optional[int] = None, gamma: Optional[float] = None) -> float:
    """Largest lambda whose mean error is within one standard error of the
    best entry's mean (the usual sparser-model convention). Restricts to one
    (K, gamma) slice when given."""
    best = report.best
    folds = np.asarray(best.fold_errors, dtype=np.float64)
    se = float(folds.std(ddof=1) / np.sqrt(folds.size)) if folds.size > 1 else 0.0
    threshold = best.mean_error + se
    k = best.k if k is None else k
    gamma = best.gamma if gamma is None else gamma
    eligible = [
        e.lam
        for e in report.entries
        if e.k == k and e.gamma == gamma and e.mean_error <= threshold
    ]
    return max(eligible) if eligible else best.lam


def export_cv_csv(report: CvReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["K", "gamma", "lambda", "mean_error", "fold_errors", "is_best"])
        for e in report.entries:
            writer.writerow(
                [
                    e.k,
                    e.gamma,
                    f"{e.lam:.10g}",
                    f"{e.mean_error:.10g}",
                    ";".join(f"{x:.10g}" for x in e.fold_errors),
                    int(e is report.best),
                ]
            )
