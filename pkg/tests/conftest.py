import numpy as np
import pytest
from scipy.special import expit

from textlogit.corpus import Document, PreprocessConfig


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def tiny_config():
    return PreprocessConfig(stopword_list=frozenset({"the", "a"}), stemmer="none")


@pytest.fixture
def toy_docs():
    return [
        Document(0, "good food good", 5),
        Document(1, "bad food", 1),
        Document(2, "good view", 4),
        Document(3, "so so", 3),  # rating 3: retained but unlabeled
    ]


def logistic_instance(seed, n=200, p=5, beta=None, intercept=0.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    if beta is None:
        beta = rng.normal(scale=0.8, size=p)
    y = rng.binomial(1, expit(X @ beta + intercept)).astype(np.float64)
    return X, y, np.asarray(beta, dtype=np.float64)
