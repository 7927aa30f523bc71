import logging
from typing import Optional, Sequence

import numpy as np

from vivada.classifiers.base import Classifier, checkpoint_vocabulary
from vivada.classifiers.cnn import CnnClassifier, cnn_features, cnn_forward, init_cnn_params, window_indices
from vivada.classifiers.han import HanClassifier, HanOutput, han_forward, init_han_params
from vivada.classifiers.lm import LmClassifier, LmModel, load_lexicon, lm_score, lm_train
from vivada.classifiers.neural import NeuralClassifier
from vivada.classifiers.tfidf import TfIdfClassifier, TfIdfModel, tfidf_score, tfidf_train, tfidf_vectorizer
from vivada.classifiers.threshold import calibrate_threshold, candidate_thresholds
from vivada.classifiers.training import EpochRecord, TrainingLog, train_neural
from vivada.config import ModelSettings
from vivada.errors import DataError
from vivada.models import Document, ModelKind
from vivada.tensor import read_checkpoint
from vivada.text import EmbeddingTable, build_vocabulary, load_embeddings
from vivada.util import PathLike

logger = logging.getLogger(__name__)

CLASSIFIERS: dict[ModelKind, type[Classifier]] = {
    ModelKind.CNN: CnnClassifier,
    ModelKind.HAN: HanClassifier,
    ModelKind.TFIDF: TfIdfClassifier,
    ModelKind.LM: LmClassifier,
}


def embedding_table(
    train: Sequence[Document], settings: ModelSettings, dim: int, rng: np.random.Generator
) -> EmbeddingTable:
    vocab_config = settings.vocabulary_config()
    vocabulary = build_vocabulary(train, vocab_config.max_size, vocab_config.min_freq)
    if settings.embeddings:
        extend_to = vocab_config.max_size if vocab_config.include_pretrained else None
        return load_embeddings(settings.embeddings, vocabulary, dim, rng, extend_to=extend_to)
    logger.info("no pretrained embeddings configured, initialising %d x %d at random", len(vocabulary), dim)
    return EmbeddingTable.random(vocabulary, dim, rng)


def build_classifier(
    kind: ModelKind,
    settings: ModelSettings,
    train: Sequence[Document],
    rng: np.random.Generator,
    name: Optional[str] = None,
) -> Classifier:
    """An untrained classifier of `kind`; neural kinds get a vocabulary and embeddings from `train`."""
    match kind:
        case ModelKind.CNN:
            config = settings.cnn_config()
            table = embedding_table(train, settings, config.embedding_dim, rng)
            return CnnClassifier.create(table, config, settings.encoding_limits(), rng, name=name or "cnn")
        case ModelKind.HAN:
            config = settings.han_config()
            table = embedding_table(train, settings, config.embedding_dim, rng)
            return HanClassifier.create(table, config, settings.encoding_limits(), rng, name=name or "han")
        case ModelKind.TFIDF:
            return TfIdfClassifier(config=settings.tfidf_config(), name=name or "tfidf")
        case ModelKind.LM:
            return LmClassifier(config=settings.lm_config(), name=name)
    raise ValueError(f"no classifier for {kind}")


def load_classifier(path: PathLike) -> Classifier:
    checkpoint = read_checkpoint(path)
    try:
        kind = ModelKind.parse(checkpoint.kind)
    except KeyError as e:
        raise DataError(f"{path}: unknown model kind {checkpoint.kind!r}") from e
    try:
        return CLASSIFIERS[kind].from_checkpoint(checkpoint)
    except KeyError as e:
        raise DataError(f"{path}: checkpoint is missing {e}") from e
