"""On-disk artifact formats: the sparse matrix text file, JSON sidecars,
and the run manifest written next to every command's outputs.

The matrix artifact is plain text so it stays diffable and language
neutral: a magic line, one header line (rows, columns, weighting scheme,
vocabulary hash), then one "row col value" triplet per nonzero entry.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy import sparse

from .corpus import DocumentTermMatrix
from .errors import SchemaError
from .solver import vocabulary_hash

MAGIC = "textlogit-dtm 1"


def write_dtm(dtm: DocumentTermMatrix, path) -> None:
    coo = dtm.matrix.tocoo()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MAGIC + "\n")
        fh.write(
            f"{dtm.n_docs} {dtm.n_terms} {dtm.weighting} "
            f"{vocabulary_hash(dtm.vocabulary)}\n"
        )
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i} {j} {v:.17g}\n")


def read_dtm(path, vocabulary: list[str]) -> DocumentTermMatrix:
    with open(path, encoding="utf-8") as fh:
        magic = fh.readline().strip()
        if magic != MAGIC:
            raise SchemaError(f"{path} is not a matrix artifact (bad magic line)")
        header = fh.readline().split()
        if len(header) != 4:
            raise SchemaError(f"{path}: malformed header")
        n, p, weighting, vocab_hash = int(header[0]), int(header[1]), header[2], header[3]
        if vocab_hash != vocabulary_hash(vocabulary):
            raise SchemaError(f"{path}: vocabulary hash does not match supplied vocabulary")
        if p != len(vocabulary):
            raise SchemaError(f"{path}: header width {p} != vocabulary size {len(vocabulary)}")
        rows, cols, vals = [], [], []
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            rows.append(int(parts[0]))
            cols.append(int(parts[1]))
            vals.append(float(parts[2]))
    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(n, p), dtype=np.float64)
    doc_freq = np.asarray((matrix > 0).sum(axis=0)).ravel().astype(np.int64)
    return DocumentTermMatrix(
        matrix=matrix,
        vocabulary=list(vocabulary),
        weighting=weighting,
        doc_freq=doc_freq,
    )


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    command: list[str]
    inputs: dict = field(default_factory=dict)  # path -> sha256
    config_hash: str = ""
    seed: int = 0
    tool_version: str = ""
    started_at: str = ""
    finished_at: str = ""
    outputs: list[str] = field(default_factory=list)

    @staticmethod
    def start(command: list[str], seed: int, config_hash: str, version: str):
        return RunManifest(
            command=list(command),
            seed=seed,
            config_hash=config_hash,
            tool_version=version,
            started_at=datetime.now(timezone.utc).isoformat(),
        )

    def add_input(self, path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def finish(self, outputs: list[str], path) -> None:
        self.outputs = [str(o) for o in outputs]
        self.finished_at = datetime.now(timezone.utc).isoformat()
        write_json(self.__dict__, path)
