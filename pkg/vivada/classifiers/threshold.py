import numpy as np

from vivada.errors import UsageError
from vivada.evaluation.metrics import f1_at


def candidate_thresholds(scores: np.ndarray) -> np.ndarray:
    """Lowest score, every midpoint between neighbouring distinct scores, and just above the highest."""
    distinct = np.unique(np.asarray(scores, dtype=np.float64))
    midpoints = (distinct[:-1] + distinct[1:]) / 2.0
    return np.concatenate([distinct[:1], midpoints, [np.nextafter(distinct[-1], np.inf)]])


def calibrate_threshold(scores, labels) -> float:
    """The threshold (predict positive when score >= threshold) maximising F1; ties go to the lowest."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(np.int64)
    if len(scores) == 0 or len(scores) != len(labels):
        raise UsageError("calibration needs equal-length, non-empty scores and labels")
    if np.all(labels == labels[0]):
        raise UsageError("calibration needs both classes in the validation set")

    best_threshold, best_f1 = None, -1.0
    for threshold in candidate_thresholds(scores):
        f1 = f1_at(scores, labels, threshold)
        if f1 > best_f1:
            best_threshold, best_f1 = float(threshold), f1
    return best_threshold
