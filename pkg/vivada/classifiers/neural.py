from abc import abstractmethod
from typing import Any, Optional, Sequence

import numpy as np

from vivada.classifiers.base import Classifier
from vivada.classifiers.training import TrainingLog, train_neural
from vivada.config import EncodingLimits, TrainConfig
from vivada.models import Document, EncodedDocument
from vivada.tensor import Graph, Node, Params, softmax
from vivada.text import Vocabulary, encode_document


class NeuralClassifier(Classifier):
    """Shared plumbing for the CNN and HAN: encoding, softmax scoring and CTRV persistence."""

    vocabulary: Vocabulary
    limits: EncodingLimits
    params: Params
    threshold: float = 0.5
    empty_score: float = 0.5

    def encode(self, doc: Document) -> EncodedDocument:
        return encode_document(doc, self.vocabulary, self.limits)

    @abstractmethod
    def logits(self, graph: Graph, encoded: EncodedDocument) -> Node: ...

    def probabilities(
        self, encoded: EncodedDocument, train: bool = False, rng: Optional[np.random.Generator] = None
    ) -> np.ndarray:
        graph = Graph(self.params, train=train, rng=rng)
        return softmax(self.logits(graph, encoded)).value

    def score_document(self, doc: Document) -> tuple[float, bool]:
        encoded = self.encode(doc)
        if encoded.empty:
            return self.empty_score, True
        return float(self.probabilities(encoded)[1]), False

    def _fit(self, train: Sequence[Document], validation: Sequence[Document], config: TrainConfig) -> TrainingLog:
        return train_neural(self, train, validation, config)

    def _hyperparameters(self) -> dict[str, Any]:
        return {"limits": self.limits.to_dict()}
