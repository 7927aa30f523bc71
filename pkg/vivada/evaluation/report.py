import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence

from vivada.config import BootstrapConfig
from vivada.errors import ParseError, UndefinedMetricError
from vivada.evaluation.bootstrap import bootstrap_ci, compare
from vivada.evaluation.metrics import METRIC_NAMES, all_metrics, prf, roc_points
from vivada.models import PredictionSet
from vivada.util import PathLike, derive_seed

logger = logging.getLogger(__name__)

NEURAL = ("cnn", "han")
LEXICAL = ("tfidf", "lm")


@dataclass
class ModelReport:
    model: str
    n: int
    metrics: dict[str, Optional[float]]
    intervals: dict[str, dict[str, Any]] = field(default_factory=dict)
    threshold: float = 0.5
    threshold_mode: str = "fixed"
    flags: List[str] = field(default_factory=list)
    empty: int = 0

    def to_record(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "n": self.n,
            "metrics": self.metrics,
            "intervals": self.intervals,
            "threshold": self.threshold,
            "threshold_mode": self.threshold_mode,
            "flags": self.flags,
            "empty": self.empty,
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "ModelReport":
        return cls(**record)


@dataclass
class EvalReport:
    """Everything one experiment run reports; serialises byte-stably (sorted keys, no timestamps)."""

    experiment: str
    seed: int
    resamples: int
    level: float
    models: List[ModelReport] = field(default_factory=list)
    # metric -> model -> model -> significant at 1 - level
    significance: dict[str, dict[str, dict[str, bool]]] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)
    notes: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, Any] = field(default_factory=dict)

    def model(self, name: str) -> ModelReport:
        for m in self.models:
            if m.model == name:
                return m
        raise KeyError(name)

    def to_record(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "resamples": self.resamples,
            "level": self.level,
            "models": [m.to_record() for m in self.models],
            "significance": self.significance,
            "provenance": self.provenance,
            "notes": self.notes,
            "tables": self.tables,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "EvalReport":
        return cls(
            experiment=record["experiment"],
            seed=record["seed"],
            resamples=record["resamples"],
            level=record["level"],
            models=[ModelReport.from_record(m) for m in record.get("models", [])],
            significance=record.get("significance", {}),
            provenance=record.get("provenance", {}),
            notes=record.get("notes", {}),
            tables=record.get("tables", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_record(json.loads(text))

    def write(self, path: PathLike):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def read(cls, path: PathLike) -> "EvalReport":
        try:
            return cls.from_json(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid report JSON: {e.msg}", line=e.lineno, path=str(path)) from e
        except (KeyError, TypeError) as e:
            raise ParseError(f"not an evaluation report: {e}", path=str(path)) from e


# -- building reports -------------------------------------------------------


def model_report(
    preds: PredictionSet,
    config: BootstrapConfig,
    seed: int,
    threshold_mode: str = "fixed",
) -> ModelReport:
    point = all_metrics(preds)
    intervals = {}
    for name in METRIC_NAMES:
        if point[name] is None:
            continue
        try:
            interval = bootstrap_ci(
                preds,
                name,
                n_resamples=config.resamples,
                level=config.level,
                seed=derive_seed(seed, f"bootstrap:{name}"),
                workers=config.workers,
            )
        except UndefinedMetricError:
            continue
        intervals[name] = interval.to_record()
    flags = list(prf(preds).flags)
    if point["auc"] is None:
        flags.append("auc-undefined")
    return ModelReport(
        model=preds.model,
        n=len(preds),
        metrics=point,
        intervals=intervals,
        threshold=preds.threshold,
        threshold_mode=threshold_mode,
        flags=flags,
        empty=int(preds.empty.sum()),
    )


def significance_matrix(
    pred_sets: Sequence[PredictionSet], config: BootstrapConfig, seed: int
) -> dict[str, dict[str, dict[str, bool]]]:
    names = [p.model for p in pred_sets]
    matrix: dict[str, dict[str, dict[str, bool]]] = {
        metric: {a: {b: False for b in names} for a in names} for metric in METRIC_NAMES
    }
    for metric in METRIC_NAMES:
        for i, a in enumerate(pred_sets):
            for b in pred_sets[i + 1 :]:
                try:
                    result = compare(
                        a,
                        b,
                        metric,
                        n_resamples=config.resamples,
                        level=config.level,
                        seed=derive_seed(seed, f"compare:{metric}"),
                        workers=config.workers,
                    )
                    significant = result.significant
                except UndefinedMetricError:
                    significant = False
                matrix[metric][a.model][b.model] = significant
                matrix[metric][b.model][a.model] = significant
    return matrix


def evaluate(
    pred_sets: Sequence[PredictionSet],
    config: BootstrapConfig,
    seed: int,
    experiment: str,
    threshold_modes: Optional[dict[str, str]] = None,
) -> EvalReport:
    threshold_modes = threshold_modes or {}
    report = EvalReport(
        experiment=experiment,
        seed=seed,
        resamples=config.resamples,
        level=config.level,
        models=[model_report(p, config, seed, threshold_modes.get(p.model, "fixed")) for p in pred_sets],
        significance=significance_matrix(pred_sets, config, seed),
    )
    report.tables["pooled"] = pooled_summary(report)
    return report


# -- summaries ---------------------------------------------------------------


def model_group(name: str) -> Optional[str]:
    base = name.lower()
    if base.startswith(NEURAL):
        return "neural"
    if base.startswith(LEXICAL):
        return "lexical"
    return None


def pooled_summary(report: EvalReport) -> dict[str, dict[str, Optional[float]]]:
    """Mean F1 and AUC of the lexical models against the neural ones."""
    pooled: dict[str, dict[str, Optional[float]]] = {}
    for group in ("lexical", "neural"):
        members = [m for m in report.models if model_group(m.model) == group]
        if not members:
            continue
        entry: dict[str, Optional[float]] = {"models": len(members)}
        for name in ("f1", "auc"):
            values = [m.metrics[name] for m in members if m.metrics.get(name) is not None]
            entry[name] = sum(values) / len(values) if values else None
        pooled[group] = entry
    return pooled


def percent_change(within: Optional[float], between: Optional[float]) -> Optional[float]:
    if within is None or between is None or within == 0:
        return None
    return (between - within) / within


def delta_table(within: EvalReport, between: EvalReport) -> dict[str, dict[str, Optional[float]]]:
    deltas = {}
    for m in within.models:
        try:
            other = between.model(m.model)
        except KeyError:
            continue
        deltas[m.model] = {name: percent_change(m.metrics.get(name), other.metrics.get(name)) for name in METRIC_NAMES}
    return deltas


def write_roc_csv(path: PathLike, pred_sets: Sequence[PredictionSet]) -> int:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["model", "fpr", "tpr"])
        for preds in pred_sets:
            try:
                points = roc_points(preds.scores, preds.truth)
            except UndefinedMetricError:
                logger.warning("no ROC curve for %s: single-class test set", preds.model)
                continue
            for fpr, tpr in points:
                writer.writerow([preds.model, f"{fpr:.6f}", f"{tpr:.6f}"])
                rows += 1
    return rows
