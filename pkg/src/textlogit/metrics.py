"""Confusion counts and the six classification metrics.

Cell a counts true positives, b false positives, c false negatives and d
true negatives. Any metric whose denominator is zero is reported as NA
(Python None), never as 0 or NaN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corpus import NEGATIVE, POSITIVE
from .errors import DimensionMismatchError, ParameterError

NA = "NA"


@dataclass(frozen=True)
class ConfusionCounts:
    a: int  # true positives
    b: int  # false positives
    c: int  # false negatives
    d: int  # true negatives

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ParameterError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


@dataclass(frozen=True)
class MetricsReport:
    tpr: Optional[float]
    tnr: Optional[float]
    ppv: Optional[float]
    npv: Optional[float]
    accuracy: Optional[float]
    f1: Optional[float]

    def as_dict(self) -> dict:
        fields = ("tpr", "tnr", "ppv", "npv", "accuracy", "f1")
        return {name: getattr(self, name) for name in fields}


def _as01(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind in ("U", "S", "O"):
        out = np.empty(arr.shape[0], dtype=np.int64)
        for i, val in enumerate(arr):
            if val == POSITIVE:
                out[i] = 1
            elif val == NEGATIVE:
                out[i] = 0
            else:
                raise ParameterError(f"unknown label {val!r}")
        return out
    if not np.isin(arr, (0, 1)).all():
        raise ParameterError("labels must be 0/1 or positive/negative")
    return arr.astype(np.int64)


def confusion(predictions, truths) -> ConfusionCounts:
    pred = _as01(predictions)
    true = _as01(truths)
    if pred.shape[0] != true.shape[0]:
        raise DimensionMismatchError(
            f"{pred.shape[0]} predictions vs {true.shape[0]} truths"
        )
    if pred.shape[0] == 0:
        raise ParameterError("need at least one prediction")
    return ConfusionCounts(
        a=int(((pred == 1) & (true == 1)).sum()),
        b=int(((pred == 1) & (true == 0)).sum()),
        c=int(((pred == 0) & (true == 1)).sum()),
        d=int(((pred == 0) & (true == 0)).sum()),
    )


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def compute_metrics(counts: ConfusionCounts) -> MetricsReport:
    if counts.total <= 0:
        raise ParameterError("confusion counts sum to zero")
    tpr = _ratio(counts.a, counts.a + counts.c)
    tnr = _ratio(counts.d, counts.b + counts.d)
    ppv = _ratio(counts.a, counts.a + counts.b)
    npv = _ratio(counts.d, counts.c + counts.d)
    accuracy = (counts.a + counts.d) / counts.total
    if tpr is None or ppv is None or (ppv + tpr) == 0:
        f1 = None
    else:
        f1 = 2.0 * ppv * tpr / (ppv + tpr)
    return MetricsReport(tpr=tpr, tnr=tnr, ppv=ppv, npv=npv, accuracy=accuracy, f1=f1)


def _show(value: Optional[float], digits: int = 4) -> str:
    return NA if value is None else f"{value:.{digits}f}"


def metrics_to_json(
    report: MetricsReport,
    features_used: Optional[int] = None,
    features_selected: Optional[int] = None,
) -> str:
    blob = {k: (NA if v is None else v) for k, v in report.as_dict().items()}
    if features_used is not None:
        blob["features_used"] = features_used
    if features_selected is not None:
        blob["features_selected"] = features_selected
    return json.dumps(blob, indent=1)


def format_metrics_table(
    report: MetricsReport,
    features_used: Optional[int] = None,
    features_selected: Optional[int] = None,
) -> str:
    rows = [
        ("TPR", _show(report.tpr)),
        ("TNR", _show(report.tnr)),
        ("PPV", _show(report.ppv)),
        ("NPV", _show(report.npv)),
        ("Accuracy", _show(report.accuracy)),
        ("F1", _show(report.f1)),
    ]
    if features_used is not None:
        rows.append(("# Features used", str(features_used)))
    if features_selected is not None:
        rows.append(("# Features selected", str(features_selected)))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)
