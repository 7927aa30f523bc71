"""Linear margin classifier over l2-normalised tf-idf vectors.

Features come from scikit-learn's `TfidfVectorizer` on the package
tokenizer: tf is the raw term count, idf(t) = ln((1 + N) / (1 + df(t))) + 1.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse
from sklearn.feature_extraction.text import TfidfVectorizer

from vivada.classifiers.base import Classifier
from vivada.config import TfIdfConfig, TrainConfig
from vivada.errors import IntegrityError, UsageError
from vivada.models import Document, ModelKind
from vivada.tensor import Checkpoint
from vivada.text import tokenize
from vivada.util import sha256_hex

logger = logging.getLogger(__name__)


def tfidf_vectorizer(vocabulary: Optional[dict[str, int]] = None) -> TfidfVectorizer:
    return TfidfVectorizer(
        tokenizer=tokenize,
        lowercase=False,
        token_pattern=None,
        smooth_idf=True,
        norm="l2",
        vocabulary=vocabulary,
    )


@dataclass
class TfIdfModel:
    vectorizer: TfidfVectorizer
    w: np.ndarray
    b: float = 0.0
    terms: List[str] = field(init=False)
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.terms = [str(t) for t in self.vectorizer.get_feature_names_out()]
        self.index = {t: i for i, t in enumerate(self.terms)}
        if len(self.w) != len(self.terms):
            raise IntegrityError(f"weight vector has {len(self.w)} entries for {len(self.terms)} terms")

    @property
    def idf(self) -> np.ndarray:
        return self.vectorizer.idf_

    def features(self, texts: Sequence[str]) -> sparse.csr_matrix:
        return sparse.csr_matrix(self.vectorizer.transform(texts))

    @classmethod
    def restore(cls, terms: Sequence[str], idf: Sequence[float], w: np.ndarray, b: float) -> "TfIdfModel":
        if len(idf) != len(terms):
            raise IntegrityError(f"{len(idf)} idf weights for {len(terms)} terms")
        vectorizer = tfidf_vectorizer({t: i for i, t in enumerate(terms)})
        vectorizer.idf_ = np.asarray(idf, dtype=np.float64)
        return cls(vectorizer=vectorizer, w=w, b=b)


def hinge_objective(X: sparse.csr_matrix, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    margins = y * (X @ w + b)
    return float(np.mean(np.maximum(0.0, 1.0 - margins)) + l2 * (w @ w))


def tfidf_train(docs: Sequence[Document], config: TfIdfConfig = TfIdfConfig()) -> TfIdfModel:
    """Subgradient descent on mean hinge loss + l2 * |w|^2, returning the best iterate seen."""
    if not docs:
        raise UsageError("tf-idf training needs a non-empty corpus")
    labels = np.array([d.y for d in docs], dtype=np.int64)
    if np.all(labels == labels[0]):
        raise UsageError("tf-idf training needs both classes")

    vectorizer = tfidf_vectorizer()
    try:
        X = sparse.csr_matrix(vectorizer.fit_transform([d.text for d in docs]))
    except ValueError as e:
        raise UsageError(f"tf-idf training corpus has no terms: {e}") from e
    y = np.where(labels == 1, 1.0, -1.0)
    n, width = X.shape

    w, b = np.zeros(width), 0.0
    best_w, best_b = w.copy(), b
    best = hinge_objective(X, y, w, b, config.l2)
    for t in range(1, config.iterations + 1):
        active = y * (X @ w + b) < 1.0
        grad_w = -(X[active].T @ y[active]) / n + 2.0 * config.l2 * w
        grad_b = -float(y[active].sum()) / n
        eta = config.step / np.sqrt(t)
        w = w - eta * grad_w
        b = b - eta * grad_b
        objective = hinge_objective(X, y, w, b, config.l2)
        if objective < best:
            best, best_w, best_b = objective, w.copy(), b

    logger.info("tf-idf: %d terms, objective %.6f after %d iterations", width, best, config.iterations)
    return TfIdfModel(vectorizer=vectorizer, w=best_w, b=best_b)


def tfidf_score_texts(texts: Sequence[str], model: TfIdfModel) -> np.ndarray:
    return model.features(texts) @ model.w + model.b


def tfidf_score(doc: Document, model: TfIdfModel) -> float:
    """Signed margin w.x + b; unseen terms contribute nothing."""
    return float(tfidf_score_texts([doc.text], model)[0])


class TfIdfClassifier(Classifier):
    kind = ModelKind.TFIDF
    empty_score = 0.0

    def __init__(
        self,
        model: TfIdfModel | None = None,
        config: TfIdfConfig = TfIdfConfig(),
        threshold: float = 0.0,
        name: str = "tfidf",
    ):
        self.model = model
        self.config = config
        self.threshold = threshold
        self.name = name

    def _fit(self, train: Sequence[Document], validation: Sequence[Document], config: TrainConfig) -> TfIdfModel:
        self.model = tfidf_train(train, self.config)
        return self.model

    def score_document(self, doc: Document) -> tuple[float, bool]:
        if self.model is None:
            raise UsageError(f"{self.name} has not been trained")
        if not any(t in self.model.index for t in tokenize(doc.text)):
            return self.empty_score, True
        return tfidf_score(doc, self.model), False

    def to_checkpoint(self) -> Checkpoint:
        if self.model is None:
            raise UsageError(f"{self.name} has not been trained")
        m = self.model
        return Checkpoint(
            kind=self.kind.value,
            hyperparameters={"tfidf": self.config.to_dict()},
            vocabulary_hash=sha256_hex("\n".join(m.terms)),
            params={},
            extra={
                "terms": m.terms,
                "idf": [float(v) for v in m.idf],
                "w": [float(v) for v in m.w],
                "b": float(m.b),
                **self._common_extra(),
            },
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> "TfIdfClassifier":
        extra = checkpoint.extra
        if checkpoint.vocabulary_hash and sha256_hex("\n".join(extra["terms"])) != checkpoint.vocabulary_hash:
            raise IntegrityError("checkpoint term list does not match its recorded hash")
        model = TfIdfModel.restore(
            terms=list(extra["terms"]),
            idf=extra["idf"],
            w=np.asarray(extra["w"], dtype=np.float64),
            b=float(extra["b"]),
        )
        classifier = cls(model, TfIdfConfig.from_dict(checkpoint.hyperparameters.get("tfidf", {})))
        classifier._restore_common(extra)
        return classifier
