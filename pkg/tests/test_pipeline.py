"""End-to-end library flow on a synthetic corpus: the exact sequence the
dataset reproduction uses (ingest, split, train-side matrix, grid search,
fit, project the test split, score)."""

import csv

import numpy as np
import pytest

from textlogit.corpus import (
    PreprocessConfig,
    build_dtm,
    ingest_csv,
    labels_vector,
    split,
    vectorize,
)
from textlogit.metrics import compute_metrics, confusion
from textlogit.model_selection import CvGrid, grid_search
from textlogit.penalty import ScadParams
from textlogit.solver import fit, predict_proba_matrix, selected_features

GOOD = ["spotless", "lovely", "friendly", "delicious", "perfect", "charming",
        "comfortable", "helpful", "gorgeous", "relaxing"]
BAD = ["filthy", "rude", "broken", "noisy", "smelly", "stale",
       "cramped", "moldy", "dreadful", "leaking"]
FILLER = ["room", "staff", "food", "night", "view", "hotel", "stay", "pool",
          "desk", "breakfast", "shower", "floor", "lobby", "window", "bed"]


@pytest.fixture(scope="module")
def review_csv(tmp_path_factory):
    rng = np.random.default_rng(99)
    path = tmp_path_factory.mktemp("corpus") / "reviews.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "rating"])
        for i in range(240):
            positive = rng.random() < 0.7
            sentiment = GOOD if positive else BAD
            words = list(rng.choice(sentiment, size=3)) + list(
                rng.choice(FILLER, size=7)
            )
            rng.shuffle(words)
            rating = int(rng.choice([4, 5] if positive else [1, 2]))
            writer.writerow([" ".join(words), rating])
        writer.writerow(["entirely average experience overall", 3])
    return path


def test_reproduction_flow(review_csv):
    docs = ingest_csv(review_csv, "text", "rating")
    assert sum(1 for d in docs if d.label is None) == 1

    config = PreprocessConfig()
    train_docs, test_docs = split(docs, 0.8, seed=0)
    assert len(train_docs) + len(test_docs) == 240

    train = build_dtm(train_docs, config)
    y_train = labels_vector(train_docs)
    grid = CvGrid(k_values=(5,), gamma_values=(3.7, 4.0), n_lambdas=10,
                  lambda_ratio=0.05)
    report = grid_search(train, y_train, grid, seed=0)
    best = report.best
    model = fit(train, y_train, ScadParams(lam=best.lam, gamma=best.gamma))

    test = vectorize(test_docs, train.vocabulary, config, idf=train.idf)
    y_test = labels_vector(test_docs)
    preds = (predict_proba_matrix(model, test) >= 0.5).astype(int)
    metrics = compute_metrics(confusion(preds, y_test))

    # planted sentiment words make the corpus almost separable
    assert metrics.f1 is not None and metrics.f1 > 0.9
    assert metrics.accuracy > 0.85

    # the keyword report should be dominated by planted sentiment stems
    picked = {term for term, _ in selected_features(model)}
    assert picked, "model selected nothing"
    stems = {t[:5] for t in picked}
    planted = {w[:5] for w in GOOD + BAD}
    overlap = sum(1 for s in stems if any(s.startswith(p[:4]) for p in planted))
    assert overlap / len(stems) > 0.5


def test_projection_respects_training_idf(review_csv):
    docs = ingest_csv(review_csv, "text", "rating")
    config = PreprocessConfig()
    train_docs, test_docs = split(docs, 0.8, seed=1)
    train = build_dtm(train_docs, config)
    test = vectorize(test_docs, train.vocabulary, config, idf=train.idf)
    assert test.vocabulary == train.vocabulary
    # a term present in every training document weighs zero in projections
    everywhere = np.flatnonzero(train.doc_freq == train.n_docs)
    for j in everywhere:
        assert test.matrix[:, j].nnz == 0
