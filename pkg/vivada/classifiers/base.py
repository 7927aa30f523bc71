import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional, Sequence

import numpy as np

from vivada.classifiers.threshold import calibrate_threshold
from vivada.config import TrainConfig
from vivada.errors import IntegrityError
from vivada.models import Document, ModelKind, PredictionSet
from vivada.tensor import Checkpoint, write_checkpoint
from vivada.text import Vocabulary
from vivada.util import PathLike

logger = logging.getLogger(__name__)


class Classifier(ABC):
    """A full-text controversy classifier: fit, score, threshold, persist."""

    kind: ModelKind
    name: str
    threshold: float
    threshold_mode: str = "fixed"
    # score given to documents with no tokens
    empty_score: float = 0.5
    training_log: Any = None

    # -- training -------------------------------------------------------------

    def fit(
        self,
        train: Sequence[Document],
        validation: Sequence[Document] = (),
        config: TrainConfig = TrainConfig(),
    ):
        log = self._fit(train, validation, config)
        self.training_log = log
        if config.calibrate:
            if not validation:
                logger.warning("%s: calibration requested without validation data, keeping %.3f", self.name, self.threshold)
            else:
                self.calibrate(validation)
        return log

    @abstractmethod
    def _fit(self, train: Sequence[Document], validation: Sequence[Document], config: TrainConfig): ...

    def calibrate(self, validation: Sequence[Document]) -> float:
        scored = [self.score_document(d) for d in validation]
        keep = [i for i, (_, empty) in enumerate(scored) if not empty]
        self.threshold = calibrate_threshold([scored[i][0] for i in keep], [validation[i].y for i in keep])
        self.threshold_mode = "calibrated"
        logger.info("%s: calibrated threshold %.6g", self.name, self.threshold)
        return self.threshold

    # -- inference ------------------------------------------------------------

    @abstractmethod
    def score_document(self, doc: Document) -> tuple[float, bool]:
        """(positive-class score, empty flag)"""

    def score(self, docs: Sequence[Document], workers: int = 1) -> list[tuple[float, bool]]:
        if workers <= 1:
            return [self.score_document(d) for d in docs]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.score_document, docs))

    def predict(self, docs: Sequence[Document], workers: int = 1, experiment: str = "") -> PredictionSet:
        """Hard label = score >= threshold; empty documents are always negative."""
        scored = self.score(docs, workers)
        scores = np.array([s for s, _ in scored], dtype=np.float64)
        empty = np.array([e for _, e in scored], dtype=bool)
        return PredictionSet(
            ids=[d.id for d in docs],
            scores=scores,
            predicted=(scores >= self.threshold) & ~empty,
            truth=np.array([d.y for d in docs], dtype=np.int64),
            model=self.name,
            experiment=experiment,
            empty=empty,
            threshold=self.threshold,
        )

    # -- persistence ----------------------------------------------------------

    @abstractmethod
    def to_checkpoint(self) -> Checkpoint: ...

    @classmethod
    @abstractmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> "Classifier": ...

    def save(self, path: PathLike):
        write_checkpoint(path, self.to_checkpoint())
        logger.info("saved %s checkpoint to %s", self.name, path)

    def _common_extra(self) -> dict:
        return {"name": self.name, "threshold": self.threshold, "threshold_mode": self.threshold_mode}

    def _restore_common(self, extra: dict, name: Optional[str] = None):
        self.name = extra.get("name", name or self.name)
        self.threshold = float(extra.get("threshold", self.threshold))
        self.threshold_mode = extra.get("threshold_mode", "fixed")


def checkpoint_vocabulary(checkpoint: Checkpoint) -> Vocabulary:
    """The vocabulary stored in a checkpoint, verified against its recorded hash."""
    vocabulary = Vocabulary.from_tokens(checkpoint.extra["vocabulary"])
    if checkpoint.vocabulary_hash and vocabulary.hash() != checkpoint.vocabulary_hash:
        raise IntegrityError("checkpoint vocabulary does not match its recorded hash")
    return vocabulary
