import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from vivada.tensor.graph import Graph, Node, Params

logger = logging.getLogger(__name__)


@dataclass
class GradCheckReport:
    """Max relative error per parameter: |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)."""

    errors: dict[str, float]
    nan_coordinates: dict[str, int] = field(default_factory=dict)
    step: float = 1e-4
    tolerance: float = 1e-4

    @property
    def max_error(self) -> float:
        return max(self.errors.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return not any(self.nan_coordinates.values()) and self.max_error < self.tolerance

    def failing(self) -> list[str]:
        return [
            name
            for name, error in self.errors.items()
            if error >= self.tolerance or self.nan_coordinates.get(name)
        ]


def grad_check(
    build: Callable[[Graph], Node],
    params: Params,
    step: float = 1e-4,
    tolerance: float = 1e-4,
    names: Optional[Iterable[str]] = None,
) -> GradCheckReport:
    """Compare reverse-mode gradients against central differences, in 64-bit.

    `build` must construct the same scalar loss on whatever graph it is
    handed; it is called once for the analytic pass and twice per
    coordinate.
    """
    wide = {name: np.array(p, dtype=np.float64) for name, p in params.items()}

    graph = Graph(wide, dtype=np.float64)
    analytic = graph.backward(build(graph), check_finite=False)

    def loss_at() -> float:
        return float(build(Graph(wide, dtype=np.float64)).value)

    errors: dict[str, float] = {}
    nans: dict[str, int] = {}
    for name in names if names is not None else wide:
        p = wide[name]
        worst = 0.0
        nan_count = 0
        for idx in np.ndindex(p.shape):
            original = p[idx]
            p[idx] = original + step
            plus = loss_at()
            p[idx] = original - step
            minus = loss_at()
            p[idx] = original

            numeric = (plus - minus) / (2.0 * step)
            exact = analytic[name][idx]
            if not (np.isfinite(numeric) and np.isfinite(exact)):
                nan_count += 1
                continue
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), 1e-8)
            worst = max(worst, error)
        errors[name] = worst
        nans[name] = nan_count
        logger.debug("grad check %s: max relative error %.3e", name, worst)

    return GradCheckReport(errors=errors, nan_coordinates=nans, step=step, tolerance=tolerance)
