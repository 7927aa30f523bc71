import logging
from collections import deque
from typing import Iterable, List, Mapping, Optional, Sequence

from vivada import constants as C
from vivada.corpus.crawler import CrawledPage
from vivada.errors import IntegrityError
from vivada.models import Document, Edge, Label, Polarity, Seed, document_id

logger = logging.getLogger(__name__)


def adjacency(edges: Iterable[Edge], nodes: Optional[set[str]] = None) -> dict[str, List[str]]:
    out: dict[str, List[str]] = {}
    for edge in edges:
        if nodes is not None and (edge.src not in nodes or edge.dst not in nodes):
            continue
        out.setdefault(edge.src, []).append(edge.dst)
    return out


def nearest_seed(
    sources: Sequence[str],
    graph: Mapping[str, List[str]],
    max_hops: Optional[int] = None,
) -> dict[str, tuple[int, int]]:
    """Multi-source BFS: url -> (distance, index of the owning source).

    Sources are enqueued in order, so among equally near sources the
    earlier one owns a page.
    """
    owner: dict[str, tuple[int, int]] = {}
    queue: deque[str] = deque()
    for i, url in enumerate(sources):
        if url not in owner:
            owner[url] = (0, i)
            queue.append(url)
    while queue:
        url = queue.popleft()
        dist, i = owner[url]
        if max_hops is not None and dist >= max_hops:
            continue
        for dst in graph.get(url, ()):
            if dst not in owner:
                owner[dst] = (dist + 1, i)
                queue.append(dst)
    return owner


def propagate_labels(
    pages: Mapping[str, CrawledPage],
    edges: Iterable[Edge],
    seeds: Sequence[Seed],
    snapshot_year: int,
    max_hops: int = C.MAX_HOPS,
) -> List[Document]:
    """Label every crawled page from the seeds that reach it.

    Anything within `max_hops` of a controversial seed is controversial and
    takes the topic of the nearest such seed; pages reached only from
    random negatives are non-controversial.
    """
    graph = adjacency(edges, set(pages))
    seeds = [s for s in seeds if s.url in pages]

    positives = [s for s in seeds if s.polarity is Polarity.CONTROVERSIAL]
    negatives = [s for s in seeds if s.polarity is Polarity.RANDOM_NEGATIVE]
    from_positive = nearest_seed([s.url for s in positives], graph, max_hops)
    from_negative = nearest_seed([s.url for s in negatives], graph, max_hops)
    from_any = nearest_seed([s.url for s in seeds], graph)

    documents = []
    for url, page in pages.items():
        if url not in from_any:
            raise IntegrityError(f"crawled page {url} is not reachable from any seed")
        hop, _ = from_any[url]
        if hop > max_hops:
            raise IntegrityError(f"crawled page {url} is {hop} hops from the nearest seed")

        if url in from_positive:
            label = Label.CONTROVERSIAL
            topic = positives[from_positive[url][1]].topic
        elif url in from_negative:
            label = Label.NON_CONTROVERSIAL
            topic = negatives[from_negative[url][1]].topic
        else:
            raise IntegrityError(f"crawled page {url} has no seed within {max_hops} hops")

        documents.append(
            Document(
                id=document_id(url),
                url=url,
                title=page.title,
                text=page.text,
                label=label,
                source=page.source,
                hop=hop,
                topic=topic,
                snapshot_year=snapshot_year,
                fetched_at=page.fetched_at,
            )
        )

    controversial = sum(d.label is Label.CONTROVERSIAL for d in documents)
    logger.info("labelled %d pages: %d controversial", len(documents), controversial)
    return documents
