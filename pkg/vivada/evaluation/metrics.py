"""Binary classification metrics over a `PredictionSet`, on `sklearn.metrics`.

Degenerate precision/recall/F1 cases are reported as 0 and flagged. AUC
and Spearman have no value on one class or zero variance and raise
`UndefinedMetricError`, which bootstrap loops catch and skip.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.stats import spearmanr
from sklearn.metrics import confusion_matrix, f1_score, precision_recall_fscore_support, roc_auc_score, roc_curve

from vivada.errors import UndefinedMetricError, UsageError
from vivada.models import PredictionSet

METRIC_NAMES = ("precision", "recall", "f1", "auc")


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    flags: tuple[str, ...] = ()


def confusion(predicted, truth) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn)"""
    tn, fp, fn, tp = confusion_matrix(
        np.asarray(truth).astype(np.int64), np.asarray(predicted).astype(np.int64), labels=[0, 1]
    ).ravel()
    return int(tp), int(fp), int(fn), int(tn)


def degenerate_flags(tp: int, fp: int, fn: int) -> tuple[str, ...]:
    flags = []
    if tp + fp == 0:
        flags.append("no-predicted-positives")
    if tp + fn == 0:
        flags.append("no-actual-positives")
    if tp == 0:
        flags.append("f1-undefined")
    return tuple(flags)


def prf_of(predicted, truth) -> PRF:
    predicted = np.asarray(predicted).astype(np.int64)
    truth = np.asarray(truth).astype(np.int64)
    precision, recall, f1, _ = precision_recall_fscore_support(
        truth, predicted, average="binary", pos_label=1, zero_division=0
    )
    tp, fp, fn, _ = confusion(predicted, truth)
    return PRF(float(precision), float(recall), float(f1), degenerate_flags(tp, fp, fn))


def prf(preds: PredictionSet) -> PRF:
    if len(preds) == 0:
        raise UsageError("precision/recall need at least one prediction")
    return prf_of(preds.predicted, preds.truth)


def f1_at(scores: np.ndarray, labels: np.ndarray, threshold: float) -> float:
    return float(f1_score(labels, (scores >= threshold).astype(np.int64), zero_division=0))


def _check_classes(labels: np.ndarray):
    positives = int(np.sum(labels == 1))
    if positives == 0:
        raise UndefinedMetricError("AUC needs at least one positive (controversial) document")
    if positives == len(labels):
        raise UndefinedMetricError("AUC needs at least one negative (non-controversial) document")


def auc(scores, labels) -> float:
    """Share of (positive, negative) pairs ranked correctly, ties counting half."""
    labels = np.asarray(labels).astype(np.int64)
    _check_classes(labels)
    return float(roc_auc_score(labels, np.asarray(scores, dtype=np.float64)))


def roc_points(scores, labels) -> List[tuple[float, float]]:
    """(fpr, tpr) at every distinct threshold, from (0, 0) to (1, 1)."""
    labels = np.asarray(labels).astype(np.int64)
    _check_classes(labels)
    fpr, tpr, _ = roc_curve(labels, np.asarray(scores, dtype=np.float64), drop_intermediate=False)
    return [(float(f), float(t)) for f, t in zip(fpr, tpr)]


@dataclass(frozen=True)
class Correlation:
    rho: Optional[float]
    n: int
    flags: tuple[str, ...] = field(default=())

    @property
    def defined(self) -> bool:
        return self.rho is not None


def spearman(x, y) -> Correlation:
    """Rank correlation with average ranks for ties; undefined (None, flagged) when either side is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise UsageError(f"spearman needs two equal-length vectors, got {x.shape} and {y.shape}")
    if len(x) < 3:
        raise UsageError(f"spearman needs at least 3 pairs, got {len(x)}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return Correlation(rho=None, n=len(x), flags=("zero-variance",))
    rho = float(spearmanr(x, y).statistic)
    return Correlation(rho=float(np.clip(rho, -1.0, 1.0)), n=len(x))


# -- metric registry --------------------------------------------------------

type Metric = Callable[[PredictionSet], float]

METRICS: dict[str, Metric] = {
    "precision": lambda p: prf(p).precision,
    "recall": lambda p: prf(p).recall,
    "f1": lambda p: prf(p).f1,
    "auc": lambda p: auc(p.scores, p.truth),
}


def metric(name: str) -> Metric:
    try:
        return METRICS[name.lower()]
    except KeyError:
        raise UsageError(f"unknown metric {name!r}; choose from {', '.join(METRIC_NAMES)}") from None


def all_metrics(preds: PredictionSet) -> dict[str, Optional[float]]:
    scores = prf(preds)
    try:
        area: Optional[float] = auc(preds.scores, preds.truth)
    except UndefinedMetricError:
        area = None
    return {"precision": scores.precision, "recall": scores.recall, "f1": scores.f1, "auc": area}
