"""Unigram language-model baseline: per-token log-likelihood ratio of two class models.

p(t | c) = (count_c(t) + mu * p(t | background)) / (|c| + mu), where the
background is the pooled training collection.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from vivada import constants as C
from vivada.classifiers.base import Classifier
from vivada.config import LmConfig, TrainConfig
from vivada.errors import IntegrityError, UsageError
from vivada.models import Document, Label, ModelKind
from vivada.tensor import Checkpoint
from vivada.text import tokenize
from vivada.util import PathLike, sha256_hex

logger = logging.getLogger(__name__)


@dataclass
class LmModel:
    terms: List[str]
    positive: np.ndarray
    negative: np.ndarray
    mu: float
    index: dict[str, int] = field(init=False, repr=False)
    log_ratio: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.positive = np.asarray(self.positive, dtype=np.float64)
        self.negative = np.asarray(self.negative, dtype=np.float64)
        if not (len(self.terms) == len(self.positive) == len(self.negative)):
            raise IntegrityError("count tables and term list differ in length")
        self.index = {t: i for i, t in enumerate(self.terms)}
        self.log_ratio = np.log(self.theta(self.positive)) - np.log(self.theta(self.negative))

    @property
    def background(self) -> np.ndarray:
        pooled = self.positive + self.negative
        return pooled / pooled.sum()

    def theta(self, counts: np.ndarray) -> np.ndarray:
        """Dirichlet-smoothed class distribution over `terms`."""
        return (counts + self.mu * self.background) / (counts.sum() + self.mu)

    def swapped(self) -> "LmModel":
        return LmModel(terms=self.terms, positive=self.negative, negative=self.positive, mu=self.mu)


def load_lexicon(path: PathLike) -> frozenset[str]:
    """One term per line; blank lines and `#` comments are ignored."""
    terms = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.update(tokenize(line))
    if not terms:
        raise UsageError(f"lexicon {path} contains no terms")
    return frozenset(terms)


def lm_train(
    docs: Sequence[Document],
    mu: float = C.DIRICHLET_MU,
    lexicon: Optional[frozenset[str]] = None,
) -> LmModel:
    """Class-partitioned unigram counts; with a lexicon, controversial documents must mention one of its terms."""
    if mu <= 0:
        raise UsageError(f"smoothing mass must be positive, got {mu}")
    positives = [d for d in docs if d.label is Label.CONTROVERSIAL]
    negatives = [d for d in docs if d.label is Label.NON_CONTROVERSIAL]
    if lexicon is not None:
        kept = [d for d in positives if lexicon.intersection(tokenize(d.text))]
        logger.info("lexicon filter kept %d of %d controversial documents", len(kept), len(positives))
        positives = kept
    if not positives or not negatives:
        raise UsageError("language model training needs documents of both classes")

    positive_counts: Counter[str] = Counter()
    negative_counts: Counter[str] = Counter()
    for d in positives:
        positive_counts.update(tokenize(d.text))
    for d in negatives:
        negative_counts.update(tokenize(d.text))
    terms = sorted(positive_counts.keys() | negative_counts.keys())
    if not terms:
        raise UsageError("language model training corpus has no tokens")
    return LmModel(
        terms=terms,
        positive=np.array([positive_counts[t] for t in terms], dtype=np.float64),
        negative=np.array([negative_counts[t] for t in terms], dtype=np.float64),
        mu=mu,
    )


def lm_ratios(text: str, model: LmModel) -> np.ndarray:
    return model.log_ratio[[model.index[t] for t in tokenize(text) if t in model.index]]


def lm_score(doc: Document, model: LmModel) -> float:
    """Mean per-token log p(t|controversial) - log p(t|non-controversial); 0 when no token is known."""
    ratios = lm_ratios(doc.text, model)
    return float(np.mean(ratios)) if len(ratios) else 0.0


class LmClassifier(Classifier):
    kind = ModelKind.LM
    empty_score = 0.0

    def __init__(
        self,
        model: Optional[LmModel] = None,
        config: LmConfig = LmConfig(),
        threshold: float = 0.0,
        name: Optional[str] = None,
    ):
        self.model = model
        self.config = config
        self.threshold = threshold
        self.name = name or ("lm-lexicon" if config.lexicon else "lm")

    def _fit(self, train: Sequence[Document], validation: Sequence[Document], config: TrainConfig) -> LmModel:
        lexicon = load_lexicon(self.config.lexicon) if self.config.lexicon else None
        self.model = lm_train(train, self.config.mu, lexicon)
        logger.info("%s: %d terms, mu=%g", self.name, len(self.model.terms), self.model.mu)
        return self.model

    def score_document(self, doc: Document) -> tuple[float, bool]:
        if self.model is None:
            raise UsageError(f"{self.name} has not been trained")
        ratios = lm_ratios(doc.text, self.model)
        if not len(ratios):
            return self.empty_score, True
        return float(np.mean(ratios)), False

    def to_checkpoint(self) -> Checkpoint:
        if self.model is None:
            raise UsageError(f"{self.name} has not been trained")
        m = self.model
        return Checkpoint(
            kind=self.kind.value,
            hyperparameters={"lm": self.config.to_dict()},
            vocabulary_hash=sha256_hex("\n".join(m.terms)),
            params={},
            extra={
                "terms": m.terms,
                "positive": [int(v) for v in m.positive],
                "negative": [int(v) for v in m.negative],
                "mu": m.mu,
                **self._common_extra(),
            },
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> "LmClassifier":
        extra = checkpoint.extra
        if checkpoint.vocabulary_hash and sha256_hex("\n".join(extra["terms"])) != checkpoint.vocabulary_hash:
            raise IntegrityError("checkpoint term list does not match its recorded hash")
        model = LmModel(terms=list(extra["terms"]), positive=extra["positive"], negative=extra["negative"], mu=float(extra["mu"]))
        classifier = cls(model, LmConfig.from_dict(checkpoint.hyperparameters.get("lm", {})))
        classifier._restore_common(extra)
        return classifier
