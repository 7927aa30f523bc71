"""Window convolutions with max-over-time pooling.

Parameters: `embedding` [V, D]; for every window size h, `conv{h}.W`
[h, D, F] and `conv{h}.b` [F]; `dense.W` [F * len(windows), 2] and
`dense.b` [2].
"""

from typing import Optional, Sequence

import numpy as np

from vivada import constants as C
from vivada.classifiers.base import checkpoint_vocabulary
from vivada.classifiers.neural import NeuralClassifier
from vivada.config import CnnConfig, EncodingLimits
from vivada.errors import DimensionError
from vivada.models import EncodedDocument, ModelKind
from vivada.tensor import Checkpoint, Graph, Node, Params, concat, dropout, max_over, relu, reshape, softmax
from vivada.tensor.init import glorot, zeros
from vivada.text import EmbeddingTable, Vocabulary


def init_cnn_params(rng: np.random.Generator, embedding: np.ndarray, config: CnnConfig) -> Params:
    vocab_size, dim = embedding.shape
    if dim != config.embedding_dim:
        raise DimensionError(f"embedding width {dim} != configured {config.embedding_dim}")
    params: Params = {"embedding": np.array(embedding, dtype=np.float32)}
    for h in config.windows:
        params[f"conv{h}.W"] = glorot(rng, (h, dim, config.filters), h * dim, config.filters)
        params[f"conv{h}.b"] = zeros(config.filters)
    pooled = config.filters * len(config.windows)
    params["dense.W"] = glorot(rng, (pooled, 2), pooled, 2)
    params["dense.b"] = zeros(2)
    return params


def window_indices(tokens: Sequence[int], h: int) -> np.ndarray:
    """[positions, h] token windows; short inputs are right-padded to one full window."""
    tokens = np.asarray(tokens, dtype=np.int64)
    if len(tokens) < h:
        tokens = np.concatenate([tokens, np.full(h - len(tokens), C.PAD_INDEX, dtype=np.int64)])
    return np.lib.stride_tricks.sliding_window_view(tokens, h)


def cnn_features(graph: Graph, tokens: Sequence[int], config: CnnConfig) -> Node:
    """The F * len(windows) max-pooled filter activations."""
    dim = graph.params["embedding"].shape[1]
    pooled = []
    for h in config.windows:
        windows = window_indices(tokens, h)
        x = reshape(graph.embed("embedding", windows), (len(windows), h * dim))
        W = reshape(graph.param(f"conv{h}.W"), (h * dim, config.filters))
        pooled.append(max_over(relu(x @ W + graph.param(f"conv{h}.b")), axis=0))
    return concat(pooled, axis=0)


def cnn_logits(graph: Graph, tokens: Sequence[int], config: CnnConfig) -> Node:
    features = dropout(cnn_features(graph, tokens, config), config.dropout, graph.train, graph.rng)
    return features @ graph.param("dense.W") + graph.param("dense.b")


def cnn_forward(
    tokens: Sequence[int],
    params: Params,
    config: CnnConfig,
    train: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Class probabilities [non-controversial, controversial]."""
    graph = Graph(params, train=train, rng=rng)
    return softmax(cnn_logits(graph, tokens, config)).value


class CnnClassifier(NeuralClassifier):
    kind = ModelKind.CNN

    def __init__(
        self,
        vocabulary: Vocabulary,
        params: Params,
        config: CnnConfig = CnnConfig(),
        limits: EncodingLimits = EncodingLimits(),
        threshold: float = 0.5,
        name: str = "cnn",
    ):
        self.vocabulary = vocabulary
        self.params = params
        self.config = config
        self.limits = limits
        self.threshold = threshold
        self.name = name

    @classmethod
    def create(
        cls,
        embeddings: EmbeddingTable,
        config: CnnConfig,
        limits: EncodingLimits,
        rng: np.random.Generator,
        name: str = "cnn",
    ) -> "CnnClassifier":
        params = init_cnn_params(rng, embeddings.matrix, config)
        return cls(embeddings.vocabulary, params, config, limits, name=name)

    def logits(self, graph: Graph, encoded: EncodedDocument) -> Node:
        # trailing pad beyond the text never reaches the convolution
        return cnn_logits(graph, encoded.tokens[: max(encoded.length, 1)], self.config)

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(
            kind=self.kind.value,
            hyperparameters={"cnn": self.config.to_dict(), **self._hyperparameters()},
            vocabulary_hash=self.vocabulary.hash(),
            params=self.params,
            extra={"vocabulary": self.vocabulary.tokens, **self._common_extra()},
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> "CnnClassifier":
        model = cls(
            vocabulary=checkpoint_vocabulary(checkpoint),
            params=checkpoint.params,
            config=CnnConfig.from_dict(checkpoint.hyperparameters["cnn"]),
            limits=EncodingLimits.from_dict(checkpoint.hyperparameters["limits"]),
        )
        model._restore_common(checkpoint.extra)
        return model
