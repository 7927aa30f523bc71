import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from vivada.config import AnnotationScale
from vivada.errors import UsageError
from vivada.evaluation.metrics import Correlation, spearman
from vivada.models import AnnotationRecord, PredictionSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgreementReport:
    """Spearman correlations of per-document model error with human judgements."""

    model: str
    n: int
    mean_annotation: Correlation
    certainty: Correlation
    disagreement: Correlation

    def to_record(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "mean_annotation": self.mean_annotation.rho,
            "certainty": self.certainty.rho,
            "disagreement": self.disagreement.rho,
            "flags": {
                name: list(c.flags)
                for name, c in (
                    ("mean_annotation", self.mean_annotation),
                    ("certainty", self.certainty),
                    ("disagreement", self.disagreement),
                )
                if c.flags
            },
        }


def agreement_report(
    preds: PredictionSet,
    annotations: Iterable[AnnotationRecord],
    scale: AnnotationScale = AnnotationScale(),
) -> AgreementReport:
    """Error is |positive score - true label|; certainty is |mean score - midpoint|; disagreement is the population std."""
    by_id = {a.id: a for a in annotations if len(a.scores) >= scale.min_annotations}
    rows = [(i, by_id[doc_id]) for i, doc_id in enumerate(preds.ids) if doc_id in by_id]
    if len(rows) < 3:
        raise UsageError(
            f"only {len(rows)} scored documents have at least {scale.min_annotations} annotations; need 3"
        )

    index = np.array([i for i, _ in rows], dtype=np.int64)
    error = np.abs(preds.scores[index] - preds.truth[index])
    means = np.array([a.mean for _, a in rows])
    spreads = np.array([a.spread for _, a in rows])

    logger.info("agreement for %s over %d annotated documents", preds.model, len(rows))
    return AgreementReport(
        model=preds.model,
        n=len(rows),
        mean_annotation=spearman(error, means),
        certainty=spearman(error, np.abs(means - scale.midpoint)),
        disagreement=spearman(error, spreads),
    )
