"""Sparse logistic regression for review sentiment.

Pipeline pieces: CSV ingestion and text preprocessing into tf-idf matrices,
a SCAD-penalized coordinate-descent solver with warm-started penalty paths,
K-fold grid search over (K, gamma, lambda), four comparison classifiers,
confusion-matrix metrics, and Monte Carlo checks of the estimator's
asymptotic behavior. See the `textlogit` CLI for the end-to-end commands.
"""

__version__ = "0.1.0"

from .corpus import (
    FREQUENCY,
    NEGATIVE,
    POSITIVE,
    TFIDF,
    Document,
    DocumentTermMatrix,
    PreprocessConfig,
    build_dtm,
    ingest_csv,
    labels_vector,
    preprocess,
    split,
    truncate_by_sparsity,
    vectorize,
)
from .metrics import ConfusionCounts, MetricsReport, compute_metrics, confusion
from .model_selection import CvGrid, CvReport, cv_error, grid_search, kfold_split
from .penalty import (
    ScadParams,
    scad_coordinate_update,
    scad_derivative,
    scad_penalty,
    soft_threshold,
)
from .solver import (
    BACKEND,
    FitOptions,
    ScadModel,
    fit,
    fit_path,
    lambda_path,
    load_model,
    negative_log_likelihood,
    objective,
    predict,
    predict_proba,
    save_model,
    selected_features,
)

__all__ = [
    "__version__",
    "BACKEND",
    "ConfusionCounts",
    "CvGrid",
    "CvReport",
    "Document",
    "DocumentTermMatrix",
    "FitOptions",
    "FREQUENCY",
    "MetricsReport",
    "NEGATIVE",
    "POSITIVE",
    "PreprocessConfig",
    "ScadModel",
    "ScadParams",
    "TFIDF",
    "build_dtm",
    "compute_metrics",
    "confusion",
    "cv_error",
    "fit",
    "fit_path",
    "grid_search",
    "ingest_csv",
    "kfold_split",
    "labels_vector",
    "lambda_path",
    "load_model",
    "negative_log_likelihood",
    "objective",
    "predict",
    "predict_proba",
    "preprocess",
    "save_model",
    "scad_coordinate_update",
    "scad_derivative",
    "scad_penalty",
    "selected_features",
    "soft_threshold",
    "split",
    "truncate_by_sparsity",
    "vectorize",
]
