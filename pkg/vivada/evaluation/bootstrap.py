"""Percentile bootstrap over a test set.

Resample r draws `rng.integers(0, n, size=n)` as the r-th call on
`numpy.random.default_rng(seed)`. Draws are made in that order on the
calling thread; only metric evaluation fans out to workers, so results do
not depend on the worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Union

import numpy as np
from tqdm import tqdm

from vivada import constants as C
from vivada.errors import UndefinedMetricError, UsageError
from vivada.evaluation.metrics import Metric, metric as metric_named
from vivada.models import PredictionSet

logger = logging.getLogger(__name__)


@dataclass
class Interval:
    """`low`..`high` is the percentile band widened just enough to hold `point`;
    the unwidened band is kept as `percentile_low`..`percentile_high`."""

    metric: str
    point: float
    low: float
    high: float
    level: float
    resamples: int
    skipped: int = 0
    percentile_low: float = float("nan")
    percentile_high: float = float("nan")
    distribution: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high

    def to_record(self) -> dict:
        return {
            "point": self.point,
            "low": self.low,
            "high": self.high,
            "level": self.level,
            "resamples": self.resamples,
            "skipped": self.skipped,
            "percentile_low": self.percentile_low,
            "percentile_high": self.percentile_high,
        }


@dataclass
class Comparison:
    metric: str
    model_a: str
    model_b: str
    difference: Interval

    @property
    def significant(self) -> bool:
        return self.difference.low > 0 or self.difference.high < 0


def resample_indices(n: int, n_resamples: int, seed: int) -> Iterator[np.ndarray]:
    rng = np.random.default_rng(seed)
    for _ in range(n_resamples):
        yield rng.integers(0, n, size=n)


def percentile_interval(values: np.ndarray, level: float) -> tuple[float, float]:
    tail = (1.0 - level) / 2.0 * 100.0
    low, high = np.percentile(values, [tail, 100.0 - tail], method="linear")
    return float(low), float(high)


def _evaluate(statistic, draws: List[np.ndarray], workers: int, progress: bool) -> List[Optional[float]]:
    def one(indices: np.ndarray) -> Optional[float]:
        try:
            return statistic(indices)
        except UndefinedMetricError:
            return None

    if workers <= 1:
        return [one(d) for d in tqdm(draws, desc="bootstrap", disable=not progress)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(one, draws), total=len(draws), desc="bootstrap", disable=not progress))


def _interval(name: str, point: float, values: List[Optional[float]], level: float) -> Interval:
    kept = np.array([v for v in values if v is not None], dtype=np.float64)
    skipped = len(values) - len(kept)
    if skipped:
        logger.debug("%s: %d of %d resamples undefined", name, skipped, len(values))
    if len(kept) == 0:
        raise UndefinedMetricError(f"{name} is undefined on every bootstrap resample")
    low, high = percentile_interval(kept, level)
    if not low <= point <= high:
        logger.debug("%s: point %.4f outside percentile band [%.4f, %.4f]", name, point, low, high)
    return Interval(
        metric=name,
        point=point,
        low=min(low, point),
        high=max(high, point),
        level=level,
        resamples=len(values),
        skipped=skipped,
        percentile_low=low,
        percentile_high=high,
        distribution=kept,
    )


def bootstrap_ci(
    preds: PredictionSet,
    metric: Union[str, Metric],
    n_resamples: int = C.BOOTSTRAP_RESAMPLES,
    level: float = C.CONFIDENCE_LEVEL,
    seed: int = 0,
    workers: int = 1,
    progress: bool = False,
) -> Interval:
    name = metric if isinstance(metric, str) else getattr(metric, "__name__", "metric")
    fn = metric_named(metric) if isinstance(metric, str) else metric
    if len(preds) < 2:
        raise UsageError("bootstrap needs at least two documents")
    if not 0.0 < level < 1.0:
        raise UsageError(f"confidence level must lie in (0, 1), got {level}")

    point = fn(preds)
    draws = list(resample_indices(len(preds), n_resamples, seed))
    values = _evaluate(lambda idx: fn(preds.take(idx)), draws, workers, progress)
    return _interval(name, point, values, level)


def compare(
    a: PredictionSet,
    b: PredictionSet,
    metric: Union[str, Metric],
    n_resamples: int = C.BOOTSTRAP_RESAMPLES,
    level: float = C.CONFIDENCE_LEVEL,
    seed: int = 0,
    workers: int = 1,
) -> Comparison:
    """Paired bootstrap of metric(a) - metric(b); significant when the interval excludes 0."""
    name = metric if isinstance(metric, str) else getattr(metric, "__name__", "metric")
    fn = metric_named(metric) if isinstance(metric, str) else metric
    b = a.aligned(b)
    if len(a) < 2:
        raise UsageError("bootstrap needs at least two documents")

    def difference(indices: np.ndarray) -> float:
        return fn(a.take(indices)) - fn(b.take(indices))

    point = difference(np.arange(len(a)))
    draws = list(resample_indices(len(a), n_resamples, seed))
    values = _evaluate(difference, draws, workers, progress=False)
    return Comparison(
        metric=name,
        model_a=a.model,
        model_b=b.model,
        difference=_interval(f"{name} difference", point, values, level),
    )
