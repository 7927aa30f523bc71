import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np

from vivada.classifiers import Classifier, build_classifier
from vivada.config import AnnotationScale, BootstrapConfig, ModelSettings
from vivada.corpus import Dataset, read_annotations, read_documents
from vivada.errors import UsageError
from vivada.evaluation import (
    EvalReport,
    ModelReport,
    agreement_report,
    delta_table,
    evaluate,
    pooled_summary,
    significance_matrix,
    write_roc_csv,
)
from vivada.evaluation.metrics import METRIC_NAMES, all_metrics
from vivada.experiments.handles import SplitHandle, load_split_handles
from vivada.experiments.provenance import provenance
from vivada.experiments.spec import ExperimentSpec
from vivada.models import AnnotationRecord, Document, ExperimentKind, Label, ModelKind, Partition, PredictionSet, Source
from vivada.render import fmt_report
from vivada.util import derive_seed, write_jsonl

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    report: EvalReport
    predictions: List[PredictionSet] = field(default_factory=list)


# -- training ---------------------------------------------------------------


def model_names(kinds: Sequence[ModelKind], settings: ModelSettings) -> List[str]:
    """Display names; repeats of a kind get a `#n` suffix."""
    names, seen = [], Counter()
    for kind in kinds:
        base = kind.value.split("-")[0]
        if kind is ModelKind.LM and settings.lm_config().lexicon:
            base = "lm-lexicon"
        seen[base] += 1
        names.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return names


def train_model(
    kind: ModelKind,
    name: str,
    settings: ModelSettings,
    train: SplitHandle,
    validation: SplitHandle,
    seed: int,
    calibrate: bool = False,
) -> Classifier:
    """Build and fit one classifier. Its random streams depend on the master seed and the model kind only."""
    train_docs = train.documents
    validation_docs = validation.documents
    rng = np.random.default_rng(derive_seed(seed, f"init:{kind.value}"))
    classifier = build_classifier(kind, settings, train_docs, rng, name=name)
    config = settings.train_config(seed=derive_seed(seed, f"train:{kind.value}"))
    if calibrate:
        config = replace(config, calibrate=True)
    logger.info("training %s on %d documents (%d validation)", name, len(train_docs), len(validation_docs))
    classifier.fit(train_docs, validation_docs, config)
    return classifier


def train_models(
    kinds: Sequence[ModelKind],
    settings: ModelSettings,
    train: SplitHandle,
    validation: SplitHandle,
    seed: int,
    calibrate: bool = False,
    parallel: bool = False,
) -> List[Classifier]:
    names = model_names(kinds, settings)
    jobs = list(zip(kinds, names))

    def run(job: tuple[ModelKind, str]) -> Classifier:
        kind, name = job
        return train_model(kind, name, settings, train, validation, seed, calibrate)

    if parallel and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]


def predict_all(classifiers: Sequence[Classifier], test: SplitHandle, experiment: str) -> List[PredictionSet]:
    docs = test.reveal_for_evaluation()
    return [c.predict(docs, experiment=experiment) for c in classifiers]


def threshold_modes(classifiers: Sequence[Classifier]) -> dict[str, str]:
    return {c.name: c.threshold_mode for c in classifiers}


def external_test(spec: ExperimentSpec, handles: dict[Partition, SplitHandle]) -> SplitHandle:
    path = spec.dataset("test")
    if path is None:
        return handles[Partition.TEST]
    return SplitHandle.of(Partition.TEST, read_documents(path))


# -- experiments ------------------------------------------------------------


def run_baseline_comparison(spec: ExperimentSpec) -> ExperimentResult:
    """Train every model once and evaluate all of them on one test set."""
    settings = spec.model_settings()
    handles = load_split_handles(spec.dataset("train"))
    test = external_test(spec, handles)
    classifiers = train_models(
        spec.model_kinds(),
        settings,
        handles[Partition.TRAIN],
        handles[Partition.VALIDATION],
        spec.seed,
        spec.calibrate,
        spec.parallel_models,
    )
    preds = predict_all(classifiers, test, "comparison")
    report = evaluate(preds, spec.bootstrap_config(), spec.seed, "comparison", threshold_modes(classifiers))
    report.notes = {"train_size": len(handles[Partition.TRAIN]), "test_size": len(test)}
    report.provenance = provenance(spec, threshold_modes(classifiers))
    return ExperimentResult(report, preds)


def run_temporal(spec: ExperimentSpec) -> ExperimentResult:
    """Within-year and between-year runs on the same test split, plus their percentage change."""
    settings = spec.model_settings()
    config = spec.bootstrap_config()
    current = load_split_handles(spec.dataset("train"))
    other = load_split_handles(spec.dataset("other"))
    test = current[Partition.TEST]

    def run(handles: dict[Partition, SplitHandle], label: str) -> tuple[List[Classifier], List[PredictionSet]]:
        classifiers = train_models(
            spec.model_kinds(),
            settings,
            handles[Partition.TRAIN],
            handles[Partition.VALIDATION],
            spec.seed,
            spec.calibrate,
            spec.parallel_models,
        )
        return classifiers, predict_all(classifiers, test, label)

    within_models, within_preds = run(current, "temporal-within")
    between_models, between_preds = run(other, "temporal")

    within = evaluate(within_preds, config, spec.seed, "temporal-within", threshold_modes(within_models))
    report = evaluate(between_preds, config, spec.seed, "temporal", threshold_modes(between_models))
    report.tables["within"] = [m.to_record() for m in within.models]
    report.tables["delta"] = delta_table(within, report)
    report.notes = {
        "within_train_size": len(current[Partition.TRAIN]),
        "between_train_size": len(other[Partition.TRAIN]),
        "test_size": len(test),
    }
    report.provenance = provenance(spec, threshold_modes(between_models))
    return ExperimentResult(report, between_preds)


@dataclass
class TopicFold:
    topic: str
    train: List[Document]
    test: List[Document]


def topic_folds(documents: Sequence[Document], k: int, seed: int) -> List[TopicFold]:
    """Leave-one-topic-out folds over the k largest topics among controversial documents.

    Non-controversial documents are dealt to folds round-robin in a seeded
    order; fold i tests on topic i's documents plus the negatives dealt to it
    and trains on everything else.
    """
    if k < 2:
        raise UsageError(f"topic cross-validation needs k >= 2, got {k}")
    sizes = Counter(d.topic for d in documents if d.label is Label.CONTROVERSIAL and d.topic)
    if len(sizes) < k:
        raise UsageError(f"only {len(sizes)} topics among controversial documents; use k <= {len(sizes)}")
    topics = [t for t, _ in sorted(sizes.items(), key=lambda pair: (-pair[1], pair[0]))[:k]]

    negatives = [d for d in documents if d.label is Label.NON_CONTROVERSIAL]
    order = np.random.default_rng(derive_seed(seed, "topic-folds")).permutation(len(negatives))
    dealt = {negatives[j].id: position % k for position, j in enumerate(order)}

    folds = []
    for i, topic in enumerate(topics):
        test = [
            d
            for d in documents
            if (d.label is Label.CONTROVERSIAL and d.topic == topic) or dealt.get(d.id) == i
        ]
        held_out = {d.id for d in test}
        folds.append(TopicFold(topic, [d for d in documents if d.id not in held_out], test))
    return folds


def averaged_report(model: str, fold_reports: Sequence[ModelReport], mode: str) -> ModelReport:
    metrics: dict[str, Optional[float]] = {}
    for name in METRIC_NAMES:
        values = [r.metrics[name] for r in fold_reports if r.metrics.get(name) is not None]
        metrics[name] = float(np.mean(values)) if values else None
    return ModelReport(
        model=model,
        n=sum(r.n for r in fold_reports),
        metrics=metrics,
        threshold=fold_reports[0].threshold,
        threshold_mode=mode,
        flags=["fold-average"],
        empty=sum(r.empty for r in fold_reports),
    )


def run_topic_cv(spec: ExperimentSpec) -> ExperimentResult:
    """Leave-one-topic-out cross-validation; metrics are averaged over folds."""
    settings = spec.model_settings()
    config = spec.bootstrap_config()
    dataset = Dataset.read(spec.dataset("train"))
    folds = topic_folds(dataset.documents, spec.folds, spec.seed)
    no_validation = SplitHandle.of(Partition.VALIDATION, [])

    per_model: dict[str, List[ModelReport]] = {}
    pooled: dict[str, List[PredictionSet]] = {}
    modes: dict[str, str] = {}
    fold_records = []
    for fold in folds:
        logger.info("fold %r: %d training, %d test documents", fold.topic, len(fold.train), len(fold.test))
        classifiers = train_models(
            spec.model_kinds(),
            settings,
            SplitHandle.of(Partition.TRAIN, fold.train),
            no_validation,
            spec.seed,
            False,
            spec.parallel_models,
        )
        preds = predict_all(classifiers, SplitHandle.of(Partition.TEST, fold.test), "topic")
        modes.update(threshold_modes(classifiers))
        reports = []
        for p in preds:
            report = ModelReport(
                model=p.model, n=len(p), metrics=all_metrics(p), threshold=p.threshold, empty=int(p.empty.sum())
            )
            per_model.setdefault(p.model, []).append(report)
            pooled.setdefault(p.model, []).append(p)
            reports.append({"model": report.model, "n": report.n, "metrics": report.metrics})
        fold_records.append(
            {"topic": fold.topic, "train_size": len(fold.train), "test_size": len(fold.test), "models": reports}
        )

    combined = [PredictionSet.concatenate(sets, experiment="topic") for sets in pooled.values()]
    report = EvalReport(
        experiment="topic",
        seed=spec.seed,
        resamples=config.resamples,
        level=config.level,
        models=[averaged_report(name, reports, modes[name]) for name, reports in per_model.items()],
        significance=significance_matrix(combined, config, spec.seed),
        tables={"folds": fold_records},
    )
    report.tables["pooled"] = pooled_summary(report)
    report.notes = {"folds": len(folds), "topics": [f.topic for f in folds]}
    report.provenance = provenance(spec, modes)
    return ExperimentResult(report, combined)


def run_domain(spec: ExperimentSpec) -> ExperimentResult:
    """Train on Wikipedia pages only and test on general-web pages only."""
    settings = spec.model_settings()
    handles = load_split_handles(spec.dataset("train"))
    def is_wiki(d: Document) -> bool:
        return d.source is Source.WIKIPEDIA

    train = handles[Partition.TRAIN].filter(is_wiki)
    validation = handles[Partition.VALIDATION].filter(is_wiki)
    test = handles[Partition.TEST].filter(lambda d: d.source is Source.GENERAL_WEB)
    if not len(train):
        raise UsageError("the train split has no Wikipedia documents")
    if not len(test):
        raise UsageError("the test split has no general-web documents")

    classifiers = train_models(
        spec.model_kinds(), settings, train, validation, spec.seed, spec.calibrate, spec.parallel_models
    )
    preds = predict_all(classifiers, test, "domain")
    report = evaluate(preds, spec.bootstrap_config(), spec.seed, "domain", threshold_modes(classifiers))
    report.notes = {"train_size": len(train), "validation_size": len(validation), "test_size": len(test)}
    report.provenance = provenance(spec, threshold_modes(classifiers))
    return ExperimentResult(report, preds)


def agreement_table(
    pred_sets: Sequence[PredictionSet], annotations: Sequence[AnnotationRecord], scale: AnnotationScale
) -> List[dict[str, Any]]:
    return [agreement_report(p, annotations, scale).to_record() for p in pred_sets]


def run_agreement(spec: ExperimentSpec) -> ExperimentResult:
    """Correlate each model's per-document error with the human annotations."""
    settings = spec.model_settings()
    config: BootstrapConfig = spec.bootstrap_config()
    scale = spec.annotation_scale()
    annotations = read_annotations(spec.dataset("annotations"), scale)
    handles = load_split_handles(spec.dataset("train"))
    test = external_test(spec, handles)

    classifiers = train_models(
        spec.model_kinds(),
        settings,
        handles[Partition.TRAIN],
        handles[Partition.VALIDATION],
        spec.seed,
        spec.calibrate,
        spec.parallel_models,
    )
    preds = predict_all(classifiers, test, "agreement")
    report = EvalReport(
        experiment="agreement",
        seed=spec.seed,
        resamples=config.resamples,
        level=config.level,
        tables={"agreement": agreement_table(preds, annotations, scale)},
        notes={"annotated": len(annotations), "test_size": len(test)},
    )
    report.provenance = provenance(spec, threshold_modes(classifiers))
    return ExperimentResult(report, preds)


RUNNERS = {
    ExperimentKind.COMPARISON: run_baseline_comparison,
    ExperimentKind.TEMPORAL: run_temporal,
    ExperimentKind.TOPIC: run_topic_cv,
    ExperimentKind.DOMAIN: run_domain,
    ExperimentKind.AGREEMENT: run_agreement,
}


def run_experiment(spec: ExperimentSpec, out_dir: Optional[Path] = None) -> ExperimentResult:
    spec.check_paths()
    kind = spec.experiment_kind
    logger.info("%s experiment, seed %d, models %s", kind.value, spec.seed, ", ".join(spec.models))
    result = RUNNERS[kind](spec)
    out_dir = out_dir or (Path(spec.out_dir) if spec.out_dir else None)
    if out_dir is not None:
        write_result(result, out_dir)
    logger.info("%s experiment finished", kind.value)
    return result


def write_result(result: ExperimentResult, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    result.report.write(out_dir / "report.json")
    (out_dir / "report.txt").write_text(fmt_report(result.report), encoding="utf-8")
    if result.predictions:
        write_jsonl(out_dir / "predictions.jsonl", (p.to_record() for p in result.predictions))
        write_roc_csv(out_dir / "roc.csv", result.predictions)
