import logging
from collections import Counter
from typing import List, Mapping, Sequence

import numpy as np

from vivada.corpus.labels import adjacency, nearest_seed
from vivada.errors import IntegrityError, UsageError
from vivada.models import DatasetSplit, Document, Edge, Partition, Polarity, Seed
from vivada.strings import percent

logger = logging.getLogger(__name__)

PARTITIONS = (Partition.TRAIN, Partition.VALIDATION, Partition.TEST)


def _apportion(n: int, counts: Mapping[Partition, int]) -> dict[Partition, int]:
    """Split `n` in the proportions of `counts`; rounding leftovers go to train."""
    total = sum(counts.values())
    shares = {p: (n * counts.get(p, 0)) // total if total else 0 for p in PARTITIONS}
    shares[Partition.TRAIN] += n - sum(shares.values())
    return shares


def split_dataset(
    documents: Sequence[Document],
    edges: Sequence[Edge],
    seeds: Sequence[Seed],
    counts: Mapping[Partition, int],
    rng_seed: int,
) -> dict[Partition, DatasetSplit]:
    """Assign seeds to partitions, then every page to the partition of its nearest seed.

    `counts` are numbers of controversial seeds. Random-negative seeds are
    shared out in the same proportions. Controversial seeds beyond the
    requested counts are left out together with their neighbourhoods.
    """
    urls = [s.url for s in seeds]
    duplicated = [url for url, n in Counter(urls).items() if n > 1]
    if duplicated:
        raise IntegrityError(f"seed(s) listed more than once: {', '.join(sorted(duplicated)[:5])}")

    by_url = {d.url: d for d in documents}
    present = [s for s in seeds if s.url in by_url]
    positives = [s for s in present if s.polarity is Polarity.CONTROVERSIAL]
    negatives = [s for s in present if s.polarity is Polarity.RANDOM_NEGATIVE]

    requested = sum(counts.get(p, 0) for p in PARTITIONS)
    if requested > len(positives):
        raise UsageError(f"{requested} controversial seeds requested but only {len(positives)} available")

    rng = np.random.default_rng(rng_seed)
    order = rng.permutation(len(positives))
    assignment: dict[str, Partition] = {}
    start = 0
    for partition in PARTITIONS:
        for i in order[start : start + counts.get(partition, 0)]:
            assignment[positives[i].url] = partition
        start += counts.get(partition, 0)
    if start < len(positives):
        logger.info("%d controversial seeds left unassigned", len(positives) - start)

    shares = _apportion(len(negatives), counts)
    order = rng.permutation(len(negatives))
    start = 0
    for partition in PARTITIONS:
        for i in order[start : start + shares[partition]]:
            assignment[negatives[i].url] = partition
        start += shares[partition]

    ordered_seeds = [s.url for s in present]
    negative_urls = {s.url for s in negatives}
    owner = nearest_seed(ordered_seeds, adjacency(edges, set(by_url)))

    splits = {p: DatasetSplit(partition=p) for p in PARTITIONS}
    for seed_url in ordered_seeds:
        if seed_url in assignment:
            split = splits[assignment[seed_url]]
            if seed_url in negative_urls:
                split.negative_seed_urls.append(seed_url)
            else:
                split.seed_urls.append(seed_url)
    dropped = 0
    for doc in documents:
        if doc.url not in owner:
            raise IntegrityError(f"document {doc.id} ({doc.url}) is not reachable from any seed")
        partition = assignment.get(ordered_seeds[owner[doc.url][1]])
        if partition is None:
            dropped += 1
            continue
        splits[partition].document_ids.append(doc.id)
    if dropped:
        logger.info("%d documents belong to unassigned seeds", dropped)
    return splits


def dataset_stats(
    splits: Mapping[Partition, DatasetSplit], documents: Sequence[Document]
) -> List[tuple[str, int, int, str, str]]:
    """Rows of (split, seeds, total, controversial (%), general web (%))."""
    rows = []
    for partition in PARTITIONS:
        if partition not in splits:
            continue
        stats = splits[partition].stats(documents)
        rows.append(
            (
                partition.value.capitalize(),
                stats.seeds,
                stats.total,
                f"{stats.controversial} ({percent(stats.controversial, stats.total)})",
                f"{stats.general_web} ({percent(stats.general_web, stats.total)})",
            )
        )
    return rows
