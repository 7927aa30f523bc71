"""JSON-lines persistence for documents, seeds, edges, annotations and splits."""

import json
import logging
from pathlib import Path
from typing import Iterable, Iterator, List, Optional

from vivada import constants as C
from vivada.config import AnnotationScale
from vivada.errors import ParseError, SchemaVersionError
from vivada.models import AnnotationRecord, DatasetSplit, Document, Edge, Partition, Seed
from vivada.util import PathLike, read_jsonl, write_jsonl

logger = logging.getLogger(__name__)


def _is_header(record: dict) -> bool:
    return set(record) == {"schema_version"}


# -- documents --------------------------------------------------------------


def write_documents(path: PathLike, documents: Iterable[Document]) -> int:
    """Header line `{"schema_version": N}`, then one document per line."""
    records = [{"schema_version": C.SCHEMA_VERSION}]
    records.extend(doc.to_record() for doc in documents)
    return write_jsonl(path, records) - 1


def read_documents(path: PathLike) -> Iterator[Document]:
    first = True
    for lineno, record in read_jsonl(path):
        if first and _is_header(record):
            first = False
            if record["schema_version"] != C.SCHEMA_VERSION:
                raise SchemaVersionError(
                    f"{path}: schema version {record['schema_version']} is not supported "
                    f"(expected {C.SCHEMA_VERSION})"
                )
            continue
        first = False
        try:
            yield Document.from_record(record)
        except (ValueError, TypeError, KeyError) as e:
            raise ParseError(str(e), line=lineno, path=str(path)) from e


# -- seeds / edges ----------------------------------------------------------


def write_seeds(path: PathLike, seeds: Iterable[Seed]) -> int:
    return write_jsonl(path, (s.to_record() for s in seeds))


def read_seeds(path: PathLike) -> List[Seed]:
    seeds = []
    for lineno, record in read_jsonl(path):
        try:
            seeds.append(Seed.from_record(record))
        except (ValueError, TypeError, KeyError) as e:
            raise ParseError(str(e), line=lineno, path=str(path)) from e
    return seeds


def write_edges(path: PathLike, edges: Iterable[Edge]) -> int:
    return write_jsonl(path, (e.to_record() for e in edges))


def read_edges(path: PathLike) -> List[Edge]:
    edges = []
    for lineno, record in read_jsonl(path):
        try:
            edges.append(Edge.from_record(record))
        except (ValueError, TypeError, KeyError) as e:
            raise ParseError(f"bad edge record: {e}", line=lineno, path=str(path)) from e
    return edges


# -- annotations ------------------------------------------------------------


def read_annotations(path: PathLike, scale: Optional[AnnotationScale] = None) -> List[AnnotationRecord]:
    scale = scale or AnnotationScale()
    records = []
    for lineno, record in read_jsonl(path):
        try:
            annotation = AnnotationRecord.from_record(record)
        except ValueError as e:
            raise ParseError(str(e), line=lineno, path=str(path)) from e
        off = [s for s in annotation.scores if not scale.on_scale(s)]
        if off:
            raise ParseError(
                f"scores {off} outside the scale [{min(scale.values)}, {max(scale.values)}]",
                line=lineno,
                path=str(path),
            )
        records.append(annotation)
    return records


# -- splits -----------------------------------------------------------------


def write_splits(path: PathLike, splits: dict[Partition, DatasetSplit], seed: int):
    payload = {"seed": seed, **{p.value: split.to_record() for p, split in splits.items()}}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write("\n")


def read_splits(path: PathLike) -> dict[Partition, DatasetSplit]:
    with open(path, encoding="utf-8") as f:
        try:
            payload = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno, path=str(path)) from e
    return {
        partition: DatasetSplit.from_record(partition, payload[partition.value])
        for partition in Partition
        if partition.value in payload
    }
