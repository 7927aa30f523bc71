from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(frozen=True)
class AnnotationRecord:
    """Per-annotator controversy scores for one document."""

    id: str
    scores: tuple[float, ...]

    def __post_init__(self):
        if not self.scores:
            raise ValueError(f"annotation {self.id} has no scores")

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))

    @property
    def spread(self) -> float:
        # population standard deviation
        return float(np.std(self.scores))

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "AnnotationRecord":
        if "id" not in record or "scores" not in record:
            raise ValueError("annotation records need `id` and `scores`")
        scores = record["scores"]
        if not isinstance(scores, list) or not all(
            isinstance(s, (int, float)) and not isinstance(s, bool) for s in scores
        ):
            raise ValueError("`scores` must be an array of numbers")
        return cls(id=str(record["id"]), scores=tuple(float(s) for s in scores))
