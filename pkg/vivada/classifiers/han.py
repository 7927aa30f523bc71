"""Hierarchical attention: words -> sentence vectors -> document vector.

Parameters: `embedding`; `word.fwd.*` / `word.bwd.*` GRU blocks over
embeddings; `word_att.W` [2H, 2H], `word_att.b`, `word_att.u` [2H];
`sent.fwd.*` / `sent.bwd.*` over 2H-wide sentence vectors; `sent_att.*`
likewise; `dense.W` [2H, 2], `dense.b` [2].
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from vivada import constants as C
from vivada.classifiers.base import checkpoint_vocabulary
from vivada.classifiers.neural import NeuralClassifier
from vivada.config import EncodingLimits, HanConfig
from vivada.errors import DimensionError, DomainError
from vivada.models import EncodedDocument, ModelKind
from vivada.tensor import (
    Checkpoint,
    Graph,
    GruCell,
    GruParams,
    Node,
    Params,
    attend,
    bidirectional,
    dropout,
    reshape,
    softmax,
    take,
    tanh,
)
from vivada.tensor.init import glorot, uniform, zeros
from vivada.text import EmbeddingTable, Vocabulary


@dataclass
class HanOutput:
    probabilities: np.ndarray
    # one row per sentence, trimmed to the sentence's length
    word_attention: List[np.ndarray]
    sentence_attention: np.ndarray


def init_han_params(rng: np.random.Generator, embedding: np.ndarray, config: HanConfig) -> Params:
    _, dim = embedding.shape
    if dim != config.embedding_dim:
        raise DimensionError(f"embedding width {dim} != configured {config.embedding_dim}")
    width = 2 * config.hidden
    params: Params = {"embedding": np.array(embedding, dtype=np.float32)}
    params |= GruParams.init(rng, dim, config.hidden).named("word.fwd")
    params |= GruParams.init(rng, dim, config.hidden).named("word.bwd")
    params |= {
        "word_att.W": uniform(rng, (width, config.attention)),
        "word_att.b": zeros(config.attention),
        "word_att.u": uniform(rng, config.attention),
    }
    params |= GruParams.init(rng, width, config.hidden).named("sent.fwd")
    params |= GruParams.init(rng, width, config.hidden).named("sent.bwd")
    params |= {
        "sent_att.W": uniform(rng, (width, config.attention)),
        "sent_att.b": zeros(config.attention),
        "sent_att.u": uniform(rng, config.attention),
    }
    params["dense.W"] = glorot(rng, (width, 2), width, 2)
    params["dense.b"] = zeros(2)
    return params


def pad_sentences(sentences: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """[S, T] index matrix right-padded with 0, and its [S, T] validity mask."""
    longest = max(len(s) for s in sentences)
    indices = np.full((len(sentences), longest), C.PAD_INDEX, dtype=np.int64)
    mask = np.zeros((len(sentences), longest), dtype=bool)
    for i, sentence in enumerate(sentences):
        indices[i, : len(sentence)] = sentence
        mask[i, : len(sentence)] = True
    return indices, mask


def attention_logits(annotations: Node, graph: Graph, prefix: str) -> Node:
    """u^T tanh(W h + b) for every row of a [rows, 2H] annotation matrix."""
    hidden = tanh(annotations @ graph.param(f"{prefix}.W") + graph.param(f"{prefix}.b"))
    return hidden @ graph.param(f"{prefix}.u")


def han_graph(graph: Graph, sentences: Sequence[Sequence[int]], config: HanConfig) -> tuple[Node, Node, Node]:
    """(logits [2], word attention [S, T], sentence attention [S])."""
    if not sentences or not all(sentences):
        raise DomainError("HAN needs at least one sentence and no empty sentences")
    width = 2 * config.hidden
    indices, mask = pad_sentences(sentences)
    n_sentences, longest = indices.shape

    # word level: all sentences advance together, padded steps keep their state
    steps = [graph.embed("embedding", indices[:, t]) for t in range(longest)]
    words = bidirectional(
        steps,
        GruCell.bind(graph, "word.fwd"),
        GruCell.bind(graph, "word.bwd"),
        mask=mask.T,
        axis=1,
    )
    scores = reshape(attention_logits(reshape(words, (n_sentences * longest, width)), graph, "word_att"), (n_sentences, longest))
    alpha = softmax(scores, mask=mask)
    sentence_vectors = attend(alpha, words)

    # sentence level
    sentence_steps = [take(sentence_vectors, i, axis=0) for i in range(n_sentences)]
    sents = bidirectional(sentence_steps, GruCell.bind(graph, "sent.fwd"), GruCell.bind(graph, "sent.bwd"))
    beta = softmax(attention_logits(sents, graph, "sent_att"))
    document = beta @ sents

    document = dropout(document, config.dropout, graph.train, graph.rng)
    logits = document @ graph.param("dense.W") + graph.param("dense.b")
    return logits, alpha, beta


def han_forward(
    sentences: Sequence[Sequence[int]],
    params: Params,
    config: HanConfig,
    train: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> HanOutput:
    graph = Graph(params, train=train, rng=rng)
    logits, alpha, beta = han_graph(graph, sentences, config)
    return HanOutput(
        probabilities=softmax(logits).value,
        word_attention=[alpha.value[i, : len(s)] for i, s in enumerate(sentences)],
        sentence_attention=beta.value,
    )


class HanClassifier(NeuralClassifier):
    kind = ModelKind.HAN

    def __init__(
        self,
        vocabulary: Vocabulary,
        params: Params,
        config: HanConfig = HanConfig(),
        limits: EncodingLimits = EncodingLimits(),
        threshold: float = 0.5,
        name: str = "han",
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
        config: HanConfig,
        limits: EncodingLimits,
        rng: np.random.Generator,
        name: str = "han",
    ) -> "HanClassifier":
        params = init_han_params(rng, embeddings.matrix, config)
        return cls(embeddings.vocabulary, params, config, limits, name=name)

    def logits(self, graph: Graph, encoded: EncodedDocument) -> Node:
        logits, _, _ = han_graph(graph, encoded.sentences, self.config)
        return logits

    def attention(self, encoded: EncodedDocument) -> HanOutput:
        return han_forward(encoded.sentences, self.params, self.config)

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(
            kind=self.kind.value,
            hyperparameters={"han": self.config.to_dict(), **self._hyperparameters()},
            vocabulary_hash=self.vocabulary.hash(),
            params=self.params,
            extra={"vocabulary": self.vocabulary.tokens, **self._common_extra()},
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> "HanClassifier":
        model = cls(
            vocabulary=checkpoint_vocabulary(checkpoint),
            params=checkpoint.params,
            config=HanConfig.from_dict(checkpoint.hyperparameters["han"]),
            limits=EncodingLimits.from_dict(checkpoint.hyperparameters["limits"]),
        )
        model._restore_common(checkpoint.extra)
        return model
