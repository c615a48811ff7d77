"""Review ingestion, text preprocessing, and document-term matrices.

The preprocessing chain is: lowercase, map punctuation to spaces, split on
whitespace, drop stop words, drop short tokens, stem. Matrices are stored
sparse (CSR) with either raw term counts or tf-idf weights, where
tf = count / tokens-in-document and idf = ln(n) - ln(document frequency).
"""

from __future__ import annotations

import csv
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import sparse

from .errors import (
    EmptyCorpusError,
    InsufficientDataError,
    ParameterError,
    RowParseError,
    SchemaError,
)
from .stemming import porter_stem
from .stopwords import STOPWORDS

POSITIVE = "positive"
NEGATIVE = "negative"

FREQUENCY = "frequency"
TFIDF = "tfidf"


@dataclass(frozen=True)
class Document:
    """One review: raw text plus its 1-5 rating."""

    id: object
    text: str
    rating: int

    def __post_init__(self):
        if self.rating not in (1, 2, 3, 4, 5):
            raise ParameterError(f"rating must be 1..5, got {self.rating!r}")

    @property
    def label(self) -> Optional[str]:
        """Positive for ratings 4-5, negative for 1-2, None for 3."""
        if self.rating >= 4:
            return POSITIVE
        if self.rating <= 2:
            return NEGATIVE
        return None


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


@dataclass(frozen=True)
class PreprocessConfig:
    stopword_list: frozenset = STOPWORDS
    stemmer: str = "porter"
    min_token_length: int = 1

    def __post_init__(self):
        if self.stemmer not in ("porter", "none"):
            raise ParameterError(f"unknown stemmer {self.stemmer!r}")
        if self.min_token_length < 1:
            raise ParameterError("min_token_length must be >= 1")
        for word in self.stopword_list:
            if word != word.lower() or any(_is_punctuation(c) for c in word):
                raise ParameterError(
                    f"stop word {word!r} must be lowercase and punctuation-free"
                )


def preprocess(text: str, config: PreprocessConfig) -> list[str]:
    """Run the full cleaning chain on one document; returns its tokens."""
    lowered = text.lower()
    cleaned = "".join(" " if _is_punctuation(c) else c for c in lowered)
    tokens = [
        t
        for t in cleaned.split()
        if t not in config.stopword_list and len(t) >= config.min_token_length
    ]
    if config.stemmer == "porter":
        tokens = [porter_stem(t) for t in tokens]
    return tokens


def ingest_csv(path, text_column: str, rating_column: str) -> list[Document]:
    """Read one Document per CSV row; rating-3 rows are kept but unlabeled."""
    docs: list[Document] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        for col in (text_column, rating_column):
            if col not in reader.fieldnames:
                raise SchemaError(f"column {col!r} not found in {path}")
        for i, row in enumerate(reader):
            raw = row.get(rating_column)
            try:
                rating = int(str(raw).strip())
            except (TypeError, ValueError):
                raise RowParseError(i, f"rating {raw!r} is not an integer") from None
            if rating not in (1, 2, 3, 4, 5):
                raise RowParseError(i, f"rating {rating} outside 1..5")
            docs.append(Document(id=i, text=row[text_column] or "", rating=rating))
    return docs


@dataclass
class DocumentTermMatrix:
    """Sparse documents-by-terms matrix with its vocabulary binding."""

    matrix: sparse.csr_matrix
    vocabulary: list[str]
    weighting: str
    doc_freq: np.ndarray  # documents containing each term, within this matrix
    idf: Optional[np.ndarray] = None  # idf used for tf-idf weighting
    doc_ids: list = field(default_factory=list)

    def __post_init__(self):
        if self.weighting not in (FREQUENCY, TFIDF):
            raise ParameterError(f"unknown weighting {self.weighting!r}")
        if len(set(self.vocabulary)) != len(self.vocabulary):
            raise ParameterError("vocabulary contains duplicates")
        if self.matrix.shape[1] != len(self.vocabulary):
            raise ParameterError("matrix width disagrees with vocabulary")
        if self.matrix.nnz and self.matrix.data.min() < 0:
            raise ParameterError("matrix entries must be nonnegative")

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[1]


def _labeled(docs: Iterable[Document]) -> list[Document]:
    return [d for d in docs if d.label is not None]


def labels_vector(docs: Sequence[Document]) -> np.ndarray:
    """0/1 vector (1 = positive) over the labeled documents, in order."""
    return np.array([1 if d.label == POSITIVE else 0 for d in _labeled(docs)])


def _token_lists(docs: Sequence[Document], config: PreprocessConfig):
    labeled = _labeled(docs)
    if not labeled:
        raise InsufficientDataError("no labeled documents")
    token_lists = [preprocess(d.text, config) for d in labeled]
    if not any(token_lists):
        raise EmptyCorpusError("every document is empty after preprocessing")
    return labeled, token_lists


def _counts_matrix(token_lists, vocab_index, n_terms):
    rows, cols, vals = [], [], []
    for i, tokens in enumerate(token_lists):
        seen: dict[int, int] = {}
        for t in tokens:
            j = vocab_index.get(t)
            if j is not None:
                seen[j] = seen.get(j, 0) + 1
        for j, c in seen.items():
            rows.append(i)
            cols.append(j)
            vals.append(float(c))
    return sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(token_lists), n_terms), dtype=np.float64
    )


def _apply_tfidf(counts: sparse.csr_matrix, token_totals: np.ndarray, idf: np.ndarray):
    tf = counts.tocoo(copy=True)
    totals = token_totals[tf.row]
    data = np.where(totals > 0, tf.data / np.maximum(totals, 1), 0.0) * idf[tf.col]
    out = sparse.csr_matrix((data, (tf.row, tf.col)), shape=counts.shape)
    out.eliminate_zeros()
    return out


def build_dtm(
    docs: Sequence[Document], config: PreprocessConfig, weighting: str = TFIDF
) -> DocumentTermMatrix:
    """Build the matrix over the union vocabulary, sorted lexicographically."""
    labeled, token_lists = _token_lists(docs, config)
    vocab = sorted({t for tokens in token_lists for t in tokens})
    vocab_index = {t: j for j, t in enumerate(vocab)}
    counts = _counts_matrix(token_lists, vocab_index, len(vocab))
    n = counts.shape[0]
    doc_freq = np.asarray((counts > 0).sum(axis=0)).ravel().astype(np.int64)
    if weighting == FREQUENCY:
        matrix, idf = counts, None
    elif weighting == TFIDF:
        idf = np.log(n) - np.log(doc_freq)
        token_totals = np.array([len(t) for t in token_lists], dtype=np.float64)
        matrix = _apply_tfidf(counts, token_totals, idf)
    else:
        raise ParameterError(f"unknown weighting {weighting!r}")
    return DocumentTermMatrix(
        matrix=matrix,
        vocabulary=vocab,
        weighting=weighting,
        doc_freq=doc_freq,
        idf=idf,
        doc_ids=[d.id for d in labeled],
    )


def vectorize(
    docs: Sequence[Document],
    vocabulary: Sequence[str],
    config: PreprocessConfig,
    weighting: str = TFIDF,
    idf: Optional[np.ndarray] = None,
) -> DocumentTermMatrix:
    """Project documents onto a fixed vocabulary (e.g. score a test split).

    Out-of-vocabulary tokens still count toward each document's token total,
    but produce no matrix entry. For tf-idf, pass the idf vector of the
    corpus the vocabulary came from.
    """
    labeled, token_lists = _token_lists(docs, config)
    vocab_index = {t: j for j, t in enumerate(vocabulary)}
    counts = _counts_matrix(token_lists, vocab_index, len(vocabulary))
    doc_freq = np.asarray((counts > 0).sum(axis=0)).ravel().astype(np.int64)
    if weighting == FREQUENCY:
        matrix = counts
        idf = None
    elif weighting == TFIDF:
        if idf is None:
            raise ParameterError("tf-idf vectorization needs the training idf")
        idf = np.asarray(idf, dtype=np.float64)
        if idf.shape[0] != len(vocabulary):
            raise ParameterError("idf length disagrees with vocabulary")
        token_totals = np.array([len(t) for t in token_lists], dtype=np.float64)
        matrix = _apply_tfidf(counts, token_totals, idf)
    else:
        raise ParameterError(f"unknown weighting {weighting!r}")
    return DocumentTermMatrix(
        matrix=matrix,
        vocabulary=list(vocabulary),
        weighting=weighting,
        doc_freq=doc_freq,
        idf=idf,
        doc_ids=[d.id for d in labeled],
    )


def truncate_by_sparsity(
    dtm: DocumentTermMatrix, threshold: float
) -> DocumentTermMatrix:
    """Keep terms whose document frequency is at least (1 - threshold) of n."""
    if not 0.0 < threshold < 1.0:
        raise ParameterError("sparsity threshold must lie in (0, 1)")
    n = dtm.n_docs
    keep = (dtm.doc_freq / n) >= (1.0 - threshold)
    idx = np.flatnonzero(keep)
    return DocumentTermMatrix(
        matrix=dtm.matrix[:, idx].tocsr(),
        vocabulary=[dtm.vocabulary[j] for j in idx],
        weighting=dtm.weighting,
        doc_freq=dtm.doc_freq[idx],
        idf=None if dtm.idf is None else dtm.idf[idx],
        doc_ids=list(dtm.doc_ids),
    )


def split(
    docs: Sequence[Document], train_fraction: float, seed: int
) -> tuple[list[Document], list[Document]]:
    """Shuffle labeled documents and split them train/test."""
    if not 0.0 < train_fraction < 1.0:
        raise ParameterError("train_fraction must lie in (0, 1)")
    labeled = _labeled(docs)
    n = len(labeled)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 labeled documents, have {n}")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    train = [labeled[i] for i in order[:n_train]]
    test = [labeled[i] for i in order[n_train:]]
    return train, test
