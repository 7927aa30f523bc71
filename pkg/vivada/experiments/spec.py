"""Experiment descriptions loaded from JSON.

Dataset roles per kind:

    comparison  train (dataset dir), test (optional documents JSONL, e.g. an external set)
    temporal    train (dataset dir of the test year), other (dataset dir of the other year)
    topic       train (dataset dir; splits not needed)
    domain      train (dataset dir)
    agreement   train (dataset dir), annotations (JSONL), test (optional documents JSONL)
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from vivada import constants as C
from vivada.config import AnnotationScale, BootstrapConfig, ModelSettings, _Config
from vivada.errors import UsageError
from vivada.models import ExperimentKind, ModelKind

REQUIRED_DATASETS = {
    ExperimentKind.COMPARISON: ("train",),
    ExperimentKind.TEMPORAL: ("train", "other"),
    ExperimentKind.TOPIC: ("train",),
    ExperimentKind.DOMAIN: ("train",),
    ExperimentKind.AGREEMENT: ("train", "annotations"),
}


@dataclass(frozen=True)
class ExperimentSpec(_Config):
    kind: str
    datasets: dict = field(default_factory=dict)
    models: tuple = ("cnn", "han", "tfidf", "lm")
    settings: dict = field(default_factory=dict)
    bootstrap: dict = field(default_factory=dict)
    scale: dict = field(default_factory=dict)
    folds: int = C.TOPIC_FOLDS
    seed: int = 0
    out_dir: Optional[str] = None
    parallel_models: bool = False
    calibrate: bool = False

    def __post_init__(self):
        try:
            kind = ExperimentKind.parse(self.kind)
        except KeyError:
            raise ValueError(f"unknown experiment kind {self.kind!r}") from None
        for model in self.models:
            try:
                ModelKind.parse(model)
            except KeyError:
                raise ValueError(f"unknown model {model!r}") from None
        if not self.models:
            raise ValueError("an experiment needs at least one model")
        missing = [role for role in REQUIRED_DATASETS[kind] if role not in self.datasets]
        if missing:
            raise ValueError(f"{kind.value} experiments need dataset(s): {', '.join(missing)}")

    @property
    def experiment_kind(self) -> ExperimentKind:
        return ExperimentKind.parse(self.kind)

    def model_kinds(self) -> list[ModelKind]:
        return [ModelKind.parse(m) for m in self.models]

    def model_settings(self) -> ModelSettings:
        return ModelSettings.from_dict(self.settings)

    def bootstrap_config(self) -> BootstrapConfig:
        return BootstrapConfig.from_dict(self.bootstrap)

    def annotation_scale(self) -> AnnotationScale:
        return AnnotationScale.from_dict(self.scale)

    def dataset(self, role: str) -> Optional[Path]:
        return Path(self.datasets[role]) if role in self.datasets else None

    def check_paths(self):
        """Every referenced dataset path must exist before anything runs."""
        for role, path in sorted(self.datasets.items()):
            if not Path(path).exists():
                raise UsageError(f"{role} dataset {path} does not exist")
