"""Command-line entry point.

    vivada seeds       saved list-page wikitext -> seeds.jsonl
    vivada crawl       seeds -> labelled dataset directory
    vivada split       dataset -> splits.json
    vivada train       one classifier on a split dataset -> CTRV checkpoint
    vivada eval        checkpoint on a test set -> report
    vivada experiment  one of the five experiment kinds from a JSON spec
    vivada report      re-render a saved report

Training configs are JSON objects with optional sections `vocabulary`
(max_size, min_freq), `limits` (max_sentences, max_words, max_tokens),
`cnn` (windows, filters, embedding_dim, dropout), `han` (hidden,
embedding_dim, dropout), `tfidf` (l2, iterations, step), `lm` (mu,
lexicon), `train` (epochs, batch_size, learning_rate, beta1, beta2,
epsilon, l2, patience, clip_norm, calibrate) and `embeddings` (path to a
word2vec file).
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from vivada import constants as C
from vivada.classifiers import TrainingLog, load_classifier
from vivada.config import BootstrapConfig, CrawlPolicy, ModelSettings
from vivada.corpus import (
    Dataset,
    HttpFetcher,
    build_dataset,
    dataset_stats,
    read_documents,
    read_seeds,
    split_dataset,
    write_seeds,
    write_splits,
)
from vivada.corpus.dataset import SPLITS_FILE
from vivada.errors import UsageError, VivadaError
from vivada.evaluation import EvalReport, evaluate, write_roc_csv
from vivada.experiments import ExperimentSpec, SplitHandle, load_split_handles, model_names, run_experiment, train_model
from vivada.models import ModelKind, Partition
from vivada.parsing import parse_seed_list
from vivada.render import fmt_dataset_stats, fmt_report
from vivada.util import derive_seed

logger = logging.getLogger("vivada")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vivada", description="Controversy detection workbench.")
    parser.add_argument("--seed", type=int, default=None, help="master seed for every random stream (default 0)")
    parser.add_argument("--log-level", default=None, help=f"logging level (default ${C.LOG_LEVEL_ENV} or INFO)")
    parser.add_argument("--quiet", action="store_true", help="no progress bars, warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("seeds", help="parse a saved list page into a seed file")
    p.add_argument("--wikitext", required=True, type=Path)
    p.add_argument("--base-url", default=C.DEFAULT_WIKI_BASE)
    p.add_argument("--out", required=True, type=Path)

    p = commands.add_parser("crawl", help="snowball-crawl from seeds into a labelled dataset")
    p.add_argument("--seeds", required=True, type=Path)
    p.add_argument("--policy", type=Path, help="CrawlPolicy JSON")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--negatives", type=int, default=0, help="random articles to draw as negative seeds")
    p.add_argument("--year", type=int, required=True, help="snapshot year recorded on every document")
    p.add_argument("--proxy", help="HTTP proxy for every request")
    p.add_argument("--fixture-server", help="local fixture server URL, used as the proxy")

    p = commands.add_parser("split", help="assign seeds and their pages to train/validation/test")
    p.add_argument("--data", required=True, type=Path)
    p.add_argument("--train", type=int, required=True, help="controversial seeds in train")
    p.add_argument("--validation", type=int, default=0)
    p.add_argument("--test", type=int, required=True)

    p = commands.add_parser("train", help="train one classifier")
    p.add_argument("--model", required=True, help="cnn | han | tfidf | lm")
    p.add_argument("--data", required=True, type=Path, help="split dataset directory")
    p.add_argument("--config", type=Path, help="training config JSON")
    p.add_argument("--out", required=True, type=Path, help="checkpoint path")
    p.add_argument("--calibrate", action="store_true", help="pick the threshold on the validation split")

    p = commands.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--checkpoint", required=True, type=Path, nargs="+")
    p.add_argument("--data", type=Path, help="split dataset directory (its test split is used)")
    p.add_argument("--test", type=Path, help="documents JSONL to evaluate on instead")
    p.add_argument("--bootstrap", type=Path, help="BootstrapConfig JSON")
    p.add_argument("--out", type=Path, help="write the JSON report here")
    p.add_argument("--roc", type=Path, help="write ROC points to this CSV")

    p = commands.add_parser("experiment", help="run an experiment from a JSON spec")
    p.add_argument("--spec", required=True, type=Path)
    p.add_argument("--kind", help="comparison | temporal | topic | domain | agreement (overrides --spec)")
    p.add_argument("--out", type=Path, help="output directory (overrides --spec)")
    p.add_argument("--parallel-models", action="store_true", help="train models concurrently")

    p = commands.add_parser("report", help="print a saved report")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--format", choices=("json", "table"), default="table")
    return parser


def configure_logging(level: Optional[str], quiet: bool):
    level = (level or os.environ.get(C.LOG_LEVEL_ENV) or ("WARNING" if quiet else "INFO")).upper()
    if level not in logging.getLevelNamesMapping():
        raise UsageError(f"unknown log level {level!r}")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


# -- commands ---------------------------------------------------------------


def cmd_seeds(args: argparse.Namespace) -> int:
    seeds = parse_seed_list(args.wikitext.read_text(encoding="utf-8"), args.base_url)
    count = write_seeds(args.out, seeds)
    print(f"{count} seeds written to {args.out}")
    return 0


def cmd_crawl(args: argparse.Namespace) -> int:
    policy = CrawlPolicy.from_file(args.policy)
    proxy = args.fixture_server or args.proxy
    fetcher = HttpFetcher(policy, proxies={"http": proxy, "https": proxy} if proxy else None)
    dataset = build_dataset(
        read_seeds(args.seeds),
        policy,
        fetcher,
        n_negatives=args.negatives,
        snapshot_year=args.year,
        out_dir=args.out,
        progress=args.progress,
    )
    print(f"{len(dataset.documents)} documents, {len(dataset.edges)} edges, {len(dataset.skipped)} skipped")
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    dataset = Dataset.read(args.data)
    counts = {Partition.TRAIN: args.train, Partition.VALIDATION: args.validation, Partition.TEST: args.test}
    splits = split_dataset(dataset.documents, dataset.edges, dataset.seeds, counts, derive_seed(args.seed, "split"))
    write_splits(args.data / SPLITS_FILE, splits, args.seed)
    print(fmt_dataset_stats(dataset_stats(splits, dataset.documents)), end="")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    try:
        kind = ModelKind.parse(args.model)
    except KeyError:
        raise UsageError(f"unknown model {args.model!r}") from None
    settings = ModelSettings.from_file(args.config)
    if args.progress:
        settings = replace(settings, train={**settings.train, "progress": True})
    handles = load_split_handles(args.data)
    classifier = train_model(
        kind,
        model_names([kind], settings)[0],
        settings,
        handles[Partition.TRAIN],
        handles[Partition.VALIDATION],
        args.seed,
        args.calibrate,
    )
    classifier.save(args.out)
    if isinstance(classifier.training_log, TrainingLog):
        log_path = args.out.with_name(args.out.name + ".log.json")
        log_path.write_text(json.dumps(classifier.training_log.to_record(), indent=2) + "\n", encoding="utf-8")
    print(f"{classifier.name} saved to {args.out} (threshold {classifier.threshold:.6g}, {classifier.threshold_mode})")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    if args.test is not None:
        test = SplitHandle.of(Partition.TEST, read_documents(args.test))
    elif args.data is not None:
        test = load_split_handles(args.data)[Partition.TEST]
    else:
        raise UsageError("eval needs --data or --test")
    classifiers = [load_classifier(path) for path in args.checkpoint]
    names = [c.name for c in classifiers]
    if len(set(names)) != len(names):
        raise UsageError(f"checkpoints share a model name: {', '.join(names)}")

    docs = test.reveal_for_evaluation()
    preds = [c.predict(docs, experiment="eval") for c in classifiers]
    report = evaluate(
        preds,
        BootstrapConfig.from_file(args.bootstrap),
        args.seed,
        "eval",
        {c.name: c.threshold_mode for c in classifiers},
    )
    if args.out:
        report.write(args.out)
    if args.roc:
        write_roc_csv(args.roc, preds)
    print(fmt_report(report), end="")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    with open(args.spec, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise UsageError(f"{args.spec}: invalid JSON: {e.msg}") from e
    if args.kind:
        data["kind"] = args.kind
    if args.seed_given:
        data["seed"] = args.seed
    if args.parallel_models:
        data["parallel_models"] = True
    spec = ExperimentSpec.from_dict(data)
    result = run_experiment(spec, args.out)
    print(fmt_report(result.report), end="")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    report = EvalReport.read(args.input)
    if args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(fmt_report(report))
    return 0


COMMANDS = {
    "seeds": cmd_seeds,
    "crawl": cmd_crawl,
    "split": cmd_split,
    "train": cmd_train,
    "eval": cmd_eval,
    "experiment": cmd_experiment,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.seed_given = args.seed is not None
    args.seed = args.seed if args.seed is not None else 0
    args.progress = not args.quiet and sys.stderr.isatty()
    try:
        configure_logging(args.log_level, args.quiet)
        return COMMANDS[args.command](args)
    except VivadaError as e:
        logger.debug("command failed", exc_info=True)
        print(f"vivada: error: {e}", file=sys.stderr)
        return e.exit_code
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"vivada: error: {e}", file=sys.stderr)
        return UsageError.exit_code
