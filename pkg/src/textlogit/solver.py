"""SCAD-penalized logistic regression via reweighted coordinate descent.

Each outer iteration rebuilds the quadratic approximation of the likelihood
at the current coefficients (weights w_i = pi_i (1 - pi_i), working response
eta + (y - pi) / w), then inner sweeps cycle through the features applying
the closed-form univariate update, keeping the residual in sync
incrementally. The intercept is updated unpenalized within every sweep.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.special import expit, logit

from .corpus import NEGATIVE, POSITIVE, DocumentTermMatrix
from .errors import (
    DegenerateDesignError,
    DegenerateLabelsError,
    DimensionMismatchError,
    NumericalError,
    ParameterError,
    VocabularyMismatchError,
)
from .penalty import ScadParams, penalty_sum
from ._kernels import BACKEND, cd_sweep

log = logging.getLogger(__name__)

PROB_CLAMP = 1e-12
# Outer steps may raise the objective by at most this much before damping.
# Under adaptive rescaling the inner loop optimizes per-coordinate rescaled
# penalties, so the original objective legitimately fluctuates by tiny
# amounts near the fixed point; the guard then only catches material jumps
# (the saturation pathology moves the objective by ~1e-1).
_DESCENT_SLACK_PLAIN = 1e-9
_DESCENT_SLACK_ADAPTIVE = 1e-3
_MAX_STEP_HALVINGS = 10

Design = Union[DocumentTermMatrix, sparse.spmatrix, np.ndarray]


@dataclass(frozen=True)
class FitOptions:
    # Inner sweeps stop at tolerance or at the cap; refreshing the quadratic
    # after ~50 sweeps reaches the same fixed point as grinding the inner
    # problem to tolerance and is several times faster at text scale.
    tolerance: float = 1e-7
    max_outer_iters: int = 100
    max_inner_sweeps: int = 50
    adaptive_rescaling: bool = True
    standardize: bool = False
    fit_intercept: bool = True
    max_abs_coef: float = math.inf
    weight_floor: float = 1e-5

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be positive")
        if self.max_outer_iters < 1 or self.max_inner_sweeps < 1:
            raise ParameterError("iteration caps must be >= 1")


@dataclass
class ScadModel:
    """Fitted sparse logistic model bound to a vocabulary."""

    intercept: float
    coefficients: dict[int, float]
    vocabulary: list[str]
    params: ScadParams
    weighting: str
    converged: bool
    outer_iterations: int
    options: FitOptions = field(default_factory=FitOptions)
    objective_history: list[float] = field(default_factory=list)
    min_curvature_history: list[float] = field(default_factory=list)
    stalled: bool = False  # descent guard rejected the last surrogate step
    ignored_terms: int = 0  # unknown-term warning counter, bumped by predict

    def dense_coefficients(self) -> np.ndarray:
        beta = np.zeros(len(self.vocabulary))
        for j, b in self.coefficients.items():
            beta[j] = b
        return beta

    @property
    def n_selected(self) -> int:
        return len(self.coefficients)


def _unpack_design(X: Design):
    vocabulary = None
    weighting = "tfidf"
    if isinstance(X, DocumentTermMatrix):
        vocabulary = list(X.vocabulary)
        weighting = X.weighting
        X = X.matrix
    if sparse.issparse(X):
        mat = X.tocsc().astype(np.float64)
    else:
        mat = sparse.csc_matrix(np.asarray(X, dtype=np.float64))
    if vocabulary is None:
        vocabulary = [f"f{j}" for j in range(mat.shape[1])]
    return mat, vocabulary, weighting


def _check_labels(y, n_rows: int, require_both_classes: bool = False) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != n_rows:
        raise DimensionMismatchError(
            f"labels have shape {y.shape}, expected ({n_rows},)"
        )
    if not np.isin(y, (0, 1)).all():
        raise DegenerateLabelsError("labels must be 0/1")
    if require_both_classes and y.min() == y.max():
        raise DegenerateLabelsError("both classes must be present")
    return y.astype(np.float64)


def _nll_from_eta(eta: np.ndarray, y: np.ndarray) -> float:
    pi = np.clip(expit(eta), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(-np.mean(y * np.log(pi) + (1.0 - y) * np.log(1.0 - pi)))


def fit(
    X: Design,
    y,
    params: ScadParams,
    options: Optional[FitOptions] = None,
    warm_start: Optional[np.ndarray] = None,
    warm_intercept: Optional[float] = None,
) -> ScadModel:
    """Fit the penalized model. `warm_start` seeds the coefficient vector."""
    options = options or FitOptions()
    mat, vocabulary, weighting = _unpack_design(X)
    n, p = mat.shape
    yf = _check_labels(y, n, require_both_classes=True)

    scales = np.ones(p)
    if options.standardize:
        col_sq = np.asarray(mat.multiply(mat).mean(axis=0)).ravel()
        col_mean = np.asarray(mat.mean(axis=0)).ravel()
        scales = np.sqrt(np.maximum(col_sq - col_mean**2, 0.0))
        scales[scales <= 0] = 1.0
        mat = mat @ sparse.diags(1.0 / scales)
        mat = mat.tocsc()

    data = np.ascontiguousarray(mat.data, dtype=np.float64)
    indices = np.ascontiguousarray(mat.indices, dtype=np.int32)
    indptr = np.ascontiguousarray(mat.indptr, dtype=np.int32)
    sq = mat.copy()
    sq.data = sq.data**2
    all_cols = np.arange(p, dtype=np.int32)

    beta = np.zeros(p)
    if warm_start is not None:
        beta[:] = np.asarray(warm_start, dtype=np.float64) * scales
    ybar = float(yf.mean())
    if warm_intercept is not None:
        b0 = np.array([float(warm_intercept)])
    elif options.fit_intercept:
        b0 = np.array([float(np.clip(logit(ybar), -15.0, 15.0))])
    else:
        b0 = np.array([0.0])

    def q_value(coefs: np.ndarray, intercept: float) -> float:
        eta = mat @ coefs + intercept
        return _nll_from_eta(eta, yf) + penalty_sum(coefs[coefs != 0], params)

    objective_history: list[float] = []
    min_curvature_history: list[float] = []
    converged = False
    stalled = False
    outer = 0
    q_current = q_value(beta, b0[0])
    slack = (
        _DESCENT_SLACK_ADAPTIVE
        if options.adaptive_rescaling
        else _DESCENT_SLACK_PLAIN
    )

    for outer in range(1, options.max_outer_iters + 1):
        eta = mat @ beta + b0[0]
        pi = expit(eta)
        w = np.maximum(pi * (1.0 - pi), options.weight_floor)
        r = (yf - pi) / w
        v = np.asarray(sq.T @ w).ravel() / n
        v0 = float(w.mean())
        nonzero_v = v[v > 0]
        min_curvature_history.append(float(nonzero_v.min()) if nonzero_v.size else 0.0)
        objective_history.append(q_current)

        beta_before = beta.copy()
        b0_before = b0[0]
        # Full sweeps admit new coordinates; between them, iterate on the
        # current nonzero set only (it is usually a tiny fraction of p).
        sweeps_left = options.max_inner_sweeps
        while sweeps_left > 0:
            change = cd_sweep(
                data, indices, indptr, n, w, r, beta, b0, v, v0,
                params.lam, params.gamma,
                options.adaptive_rescaling, options.fit_intercept,
                options.max_abs_coef, all_cols,
            )
            sweeps_left -= 1
            if change < options.tolerance:
                break
            active = np.flatnonzero(beta).astype(np.int32)
            if active.size == p:
                continue
            while sweeps_left > 0 and active.size:
                change = cd_sweep(
                    data, indices, indptr, n, w, r, beta, b0, v, v0,
                    params.lam, params.gamma,
                    options.adaptive_rescaling, options.fit_intercept,
                    options.max_abs_coef, active,
                )
                sweeps_left -= 1
                if change < options.tolerance:
                    break
        if not np.isfinite(beta).all() or not np.isfinite(b0[0]):
            raise NumericalError("coefficients diverged; consider a larger lam")

        # Descent guard: the surrogate can mislead when probabilities
        # saturate and the weights collapse; damp such steps rather than
        # letting the iterate oscillate.
        q_prop = q_value(beta, b0[0])
        if q_prop > q_current + slack:
            # damped retries must strictly improve, otherwise the iterate
            # would erode toward the rejected proposal one sliver at a time
            step = 1.0
            accepted = False
            delta_beta = beta - beta_before
            delta_b0 = b0[0] - b0_before
            for _ in range(_MAX_STEP_HALVINGS):
                step *= 0.5
                trial_beta = beta_before + step * delta_beta
                trial_b0 = b0_before + step * delta_b0
                q_trial = q_value(trial_beta, trial_b0)
                if q_trial < q_current:
                    beta, b0[0], q_prop = trial_beta, trial_b0, q_trial
                    accepted = True
                    break
            if not accepted:
                beta, b0[0] = beta_before, b0_before
                stalled = True
                converged = True
                log.debug(
                    "surrogate step rejected at outer %d; stopping at the "
                    "last improving iterate", outer,
                )
                break
        q_current = q_prop

        outer_change = abs(b0[0] - b0_before)
        if p:
            outer_change = max(outer_change, float(np.abs(beta - beta_before).max()))
        if outer_change < options.tolerance:
            converged = True
            break

    objective_history.append(q_value(beta, b0[0]))

    beta_out = beta / scales
    beta_out[np.abs(beta_out) < 1e-12] = 0.0  # drop thresholding dust
    coefficients = {int(j): float(beta_out[j]) for j in np.flatnonzero(beta_out)}
    return ScadModel(
        intercept=float(b0[0]),
        coefficients=coefficients,
        vocabulary=vocabulary,
        params=params,
        weighting=weighting,
        converged=converged,
        outer_iterations=outer,
        options=options,
        objective_history=objective_history,
        min_curvature_history=min_curvature_history,
        stalled=stalled,
    )


def lambda_path(X: Design, y, n_lambdas: int = 30, ratio: float = 0.01) -> np.ndarray:
    """Descending log-spaced penalty levels from lambda_max down."""
    if n_lambdas < 2:
        raise ParameterError("n_lambdas must be >= 2")
    if not 0.0 < ratio < 1.0:
        raise ParameterError("ratio must lie in (0, 1)")
    mat, _, _ = _unpack_design(X)
    n = mat.shape[0]
    yf = _check_labels(y, n)
    score = np.asarray(mat.T @ (yf - yf.mean())).ravel() / n
    lam_max = float(np.abs(score).max()) if score.size else 0.0
    if lam_max <= 0.0:
        raise DegenerateDesignError("design carries no signal; lambda_max is 0")
    # nudge above the exact boundary so the argmax coordinate stays in the
    # dead zone despite summation-order rounding
    lam_max *= 1.0 + 1e-10
    return np.geomspace(lam_max, ratio * lam_max, n_lambdas)


def fit_path(
    X: Design,
    y,
    lambdas: Sequence[float],
    gamma: float = 3.7,
    options: Optional[FitOptions] = None,
) -> list[ScadModel]:
    """Fit once per lambda, warm-starting each fit from the previous one."""
    options = options or FitOptions()
    models = []
    beta_prev = None
    b0_prev = None
    for lam in lambdas:
        model = fit(
            X, y, ScadParams(lam=float(lam), gamma=gamma), options,
            warm_start=beta_prev, warm_intercept=b0_prev,
        )
        models.append(model)
        beta_prev = model.dense_coefficients()
        b0_prev = model.intercept
    return models


def negative_log_likelihood(model: ScadModel, X: Design, y) -> float:
    mat, _, _ = _unpack_design(X)
    if mat.shape[1] != len(model.vocabulary):
        raise DimensionMismatchError("matrix width disagrees with model vocabulary")
    yf = _check_labels(y, mat.shape[0])
    eta = mat @ model.dense_coefficients() + model.intercept
    return _nll_from_eta(eta, yf)


def objective(model: ScadModel, X: Design, y) -> float:
    return negative_log_likelihood(model, X, y) + penalty_sum(
        model.coefficients.values(), model.params
    )


def _row_score(model: ScadModel, row) -> float:
    """Sparse dot product against the model, ignoring unknown terms."""
    p = len(model.vocabulary)
    ignored = 0
    score = 0.0
    if isinstance(row, dict):
        index = getattr(model, "_vocab_index", None)
        if index is None:
            index = {t: j for j, t in enumerate(model.vocabulary)}
            object.__setattr__(model, "_vocab_index", index)
        for key, value in row.items():
            if isinstance(key, str):
                j = index.get(key)
            else:
                j = int(key) if 0 <= int(key) < p else None
            if j is None:
                ignored += 1
                continue
            score += model.coefficients.get(j, 0.0) * float(value)
    else:
        if sparse.issparse(row):
            row = np.asarray(row.todense()).ravel()
        else:
            row = np.asarray(row, dtype=np.float64).ravel()
        if row.shape[0] != p:
            raise DimensionMismatchError(
                f"row has {row.shape[0]} entries, model expects {p}"
            )
        for j, b in model.coefficients.items():
            score += b * float(row[j])
    if ignored:
        model.ignored_terms += ignored
        log.warning("ignored %d unknown terms in prediction row", ignored)
    return score


def predict_proba(model: ScadModel, row) -> float:
    eta = model.intercept + _row_score(model, row)
    return float(np.clip(expit(eta), PROB_CLAMP, 1.0 - PROB_CLAMP))


def predict(model: ScadModel, row, cutoff: float = 0.5) -> str:
    return POSITIVE if predict_proba(model, row) >= cutoff else NEGATIVE


def predict_proba_matrix(model: ScadModel, X: Design) -> np.ndarray:
    mat, _, _ = _unpack_design(X)
    if mat.shape[1] != len(model.vocabulary):
        raise DimensionMismatchError("matrix width disagrees with model vocabulary")
    eta = mat @ model.dense_coefficients() + model.intercept
    return np.clip(expit(eta), PROB_CLAMP, 1.0 - PROB_CLAMP)


def predict_matrix(model: ScadModel, X: Design, cutoff: float = 0.5) -> np.ndarray:
    """0/1 predictions for every row (1 = positive)."""
    return (predict_proba_matrix(model, X) >= cutoff).astype(np.int64)


def selected_features(model: ScadModel) -> list[tuple[str, float]]:
    """Nonzero terms, largest |coefficient| first, ties alphabetical."""
    pairs = [(model.vocabulary[j], b) for j, b in model.coefficients.items()]
    return sorted(pairs, key=lambda tb: (-abs(tb[1]), tb[0]))


def vocabulary_hash(vocabulary: Sequence[str]) -> str:
    digest = hashlib.sha256("\n".join(vocabulary).encode("utf-8"))
    return digest.hexdigest()


def model_to_dict(model: ScadModel) -> dict:
    return {
        "model_type": "scad_logistic",
        "intercept": model.intercept,
        "coefficients": [
            [model.vocabulary[j], b] for j, b in sorted(model.coefficients.items())
        ],
        "lambda": model.params.lam,
        "gamma": model.params.gamma,
        "weighting": model.weighting,
        "vocabulary_hash": vocabulary_hash(model.vocabulary),
    }


def save_model(model: ScadModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=1)


def load_model(path, vocabulary: Sequence[str]) -> ScadModel:
    """Rebuild a model from JSON; the vocabulary must hash-match."""
    with open(path, encoding="utf-8") as fh:
        blob = json.load(fh)
    if blob.get("vocabulary_hash") != vocabulary_hash(vocabulary):
        raise VocabularyMismatchError(
            "supplied vocabulary does not match the one the model was fit on"
        )
    index = {t: j for j, t in enumerate(vocabulary)}
    coefficients = {index[term]: float(b) for term, b in blob["coefficients"]}
    return ScadModel(
        intercept=float(blob["intercept"]),
        coefficients=coefficients,
        vocabulary=list(vocabulary),
        params=ScadParams(lam=float(blob["lambda"]), gamma=float(blob["gamma"])),
        weighting=blob.get("weighting", "tfidf"),
        converged=True,
        outer_iterations=0,
    )


__all__ = [
    "BACKEND",
    "FitOptions",
    "ScadModel",
    "fit",
    "fit_path",
    "lambda_path",
    "negative_log_likelihood",
    "objective",
    "predict",
    "predict_proba",
    "predict_matrix",
    "predict_proba_matrix",
    "selected_features",
    "save_model",
    "load_model",
    "model_to_dict",
    "vocabulary_hash",
]
