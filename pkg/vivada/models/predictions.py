from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from vivada.errors import UsageError


@dataclass
class PredictionSet:
    """Aligned per-document outputs of one model on one test set."""

    ids: list[str]
    scores: np.ndarray
    predicted: np.ndarray
    truth: np.ndarray
    model: str = ""
    experiment: str = ""
    empty: Optional[np.ndarray] = None
    threshold: float = 0.5

    def __post_init__(self):
        self.ids = list(self.ids)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        self.predicted = np.asarray(self.predicted, dtype=bool)
        self.truth = np.asarray(self.truth, dtype=np.int64)
        self.empty = np.zeros(len(self.ids), dtype=bool) if self.empty is None else np.asarray(self.empty, dtype=bool)
        n = len(self.ids)
        if not all(len(a) == n for a in (self.scores, self.predicted, self.truth, self.empty)):
            raise ValueError("prediction arrays must have equal lengths")
        if not np.all(np.isfinite(self.scores)):
            raise ValueError(f"{self.model or 'prediction set'} has non-finite scores")
        if not np.all(np.isin(self.truth, (0, 1))):
            raise ValueError("true labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.ids)

    def take(self, indices: np.ndarray) -> "PredictionSet":
        return PredictionSet(
            ids=[self.ids[i] for i in indices],
            scores=self.scores[indices],
            predicted=self.predicted[indices],
            truth=self.truth[indices],
            model=self.model,
            experiment=self.experiment,
            empty=self.empty[indices],
            threshold=self.threshold,
        )

    def aligned(self, other: "PredictionSet") -> "PredictionSet":
        """`other` reordered to this set's document order."""
        if self.ids == other.ids:
            return other
        position = {doc_id: i for i, doc_id in enumerate(other.ids)}
        if len(position) != len(other.ids) or set(position) != set(self.ids) or len(self.ids) != len(other.ids):
            raise UsageError(f"{self.model} and {other.model} were scored on different documents")
        return other.take(np.array([position[doc_id] for doc_id in self.ids], dtype=np.int64))

    def with_threshold(self, threshold: float) -> "PredictionSet":
        predicted = (self.scores >= threshold) & ~self.empty
        return PredictionSet(
            ids=self.ids,
            scores=self.scores,
            predicted=predicted,
            truth=self.truth,
            model=self.model,
            experiment=self.experiment,
            empty=self.empty,
            threshold=threshold,
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "experiment": self.experiment,
            "threshold": self.threshold,
            "ids": self.ids,
            "scores": self.scores.tolist(),
            "predicted": self.predicted.astype(int).tolist(),
            "truth": self.truth.tolist(),
            "empty": self.empty.astype(int).tolist(),
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "PredictionSet":
        return cls(
            ids=record["ids"],
            scores=record["scores"],
            predicted=record["predicted"],
            truth=record["truth"],
            model=record.get("model", ""),
            experiment=record.get("experiment", ""),
            empty=record.get("empty"),
            threshold=record.get("threshold", 0.5),
        )

    @classmethod
    def concatenate(cls, sets: Sequence["PredictionSet"], model: str = "", experiment: str = "") -> "PredictionSet":
        return cls(
            ids=[doc_id for s in sets for doc_id in s.ids],
            scores=np.concatenate([s.scores for s in sets]),
            predicted=np.concatenate([s.predicted for s in sets]),
            truth=np.concatenate([s.truth for s in sets]),
            model=model or (sets[0].model if sets else ""),
            experiment=experiment or (sets[0].experiment if sets else ""),
            empty=np.concatenate([s.empty for s in sets]),
        )
