import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from vivada.config import CrawlPolicy
from vivada.corpus import dataset_io
from vivada.corpus.crawler import crawl_snowball
from vivada.corpus.fetcher import Fetcher, FetchResult
from vivada.corpus.labels import propagate_labels
from vivada.corpus.negatives import draw_random_seeds
from vivada.errors import UsageError
from vivada.models import Document, Edge, Polarity, Seed
from vivada.util import PathLike

logger = logging.getLogger(__name__)

DOCUMENTS_FILE = "documents.jsonl"
EDGES_FILE = "edges.jsonl"
SEEDS_FILE = "seeds.jsonl"
SPLITS_FILE = "splits.json"


@dataclass
class Dataset:
    documents: List[Document]
    edges: List[Edge]
    seeds: List[Seed]
    skipped: dict[str, str] = field(default_factory=dict)

    def write(self, directory: PathLike):
        directory = Path(directory)
        dataset_io.write_documents(directory / DOCUMENTS_FILE, self.documents)
        dataset_io.write_edges(directory / EDGES_FILE, self.edges)
        dataset_io.write_seeds(directory / SEEDS_FILE, self.seeds)

    @classmethod
    def read(cls, directory: PathLike) -> "Dataset":
        directory = Path(directory)
        edges = dataset_io.read_edges(directory / EDGES_FILE) if (directory / EDGES_FILE).exists() else []
        seeds = dataset_io.read_seeds(directory / SEEDS_FILE) if (directory / SEEDS_FILE).exists() else []
        return cls(documents=list(dataset_io.read_documents(directory / DOCUMENTS_FILE)), edges=edges, seeds=seeds)


def build_dataset(
    seeds: Sequence[Seed],
    policy: CrawlPolicy,
    fetcher: Fetcher,
    n_negatives: int,
    snapshot_year: int,
    out_dir: Optional[PathLike] = None,
    progress: bool = False,
) -> Dataset:
    """Crawl the controversial seeds, draw random negatives that avoid them, then
    relabel everything from one combined crawl so the positive-dominant rule sees every path."""
    positives = [s for s in seeds if s.polarity is Polarity.CONTROVERSIAL]
    if not positives:
        raise UsageError("seed list has no controversial seeds")

    first = crawl_snowball(positives, policy, fetcher, progress=progress)
    responses: dict[str, FetchResult] = dict(first.responses)

    negatives = [s for s in seeds if s.polarity is Polarity.RANDOM_NEGATIVE]
    if n_negatives > 0:
        negatives += draw_random_seeds(fetcher, n_negatives, policy, exclude=set(first.pages), responses=responses)

    all_seeds = positives + negatives
    combined = crawl_snowball(all_seeds, policy, fetcher, prefetched=responses, progress=progress)
    documents = propagate_labels(combined.pages, combined.edges, all_seeds, snapshot_year, policy.max_hops)

    dataset = Dataset(
        documents=documents,
        edges=combined.edges,
        seeds=[s for s in all_seeds if s.url in combined.pages],
        skipped=combined.skipped,
    )
    if out_dir is not None:
        dataset.write(out_dir)
        logger.info("dataset written to %s", out_dir)
    return dataset
