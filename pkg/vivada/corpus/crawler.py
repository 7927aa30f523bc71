"""Level-synchronous snowball crawl from a seed list.

Fetches within one hop level may run concurrently; frontier updates,
dedup and hop assignment happen on the calling thread only.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, List, Optional, Sequence, Union

from tqdm import tqdm

from vivada.config import CrawlPolicy
from vivada.corpus.extract import extract_page
from vivada.corpus.fetcher import Fetcher, FetchResult
from vivada.errors import UsageError
from vivada.models import Edge, Seed, Source, source_of

logger = logging.getLogger(__name__)


@dataclass
class CrawledPage:
    url: str
    final_url: str
    hop: int
    title: str
    text: str
    source: Source
    fetched_at: datetime
    malformed: bool = False


@dataclass
class CrawlResult:
    seeds: List[Seed]
    # fetch order
    pages: dict[str, CrawledPage] = field(default_factory=dict)
    edges: List[Edge] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)
    # requested URL -> the page URL it redirected onto
    aliases: dict[str, str] = field(default_factory=dict)
    responses: dict[str, FetchResult] = field(default_factory=dict, repr=False)

    def hops(self) -> dict[str, int]:
        return {url: page.hop for url, page in self.pages.items()}


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _merge_aliases(edges: List[Edge], aliases: dict[str, str]) -> List[Edge]:
    merged: List[Edge] = []
    seen: set[tuple[str, str, str]] = set()
    for edge in edges:
        dst = aliases.get(edge.dst, edge.dst)
        key = (edge.src, dst, edge.link_class)
        if dst == edge.src or key in seen:
            continue
        seen.add(key)
        merged.append(Edge(src=edge.src, dst=dst, link_class=edge.link_class))
    return merged


def crawl_snowball(
    seeds: Sequence[Union[Seed, str]],
    policy: CrawlPolicy,
    fetcher: Fetcher,
    prefetched: Optional[dict[str, FetchResult]] = None,
    clock: Callable[[], datetime] = _utcnow,
    progress: bool = False,
) -> CrawlResult:
    """Breadth-first expansion up to `policy.max_hops`, each URL fetched once at its minimal hop."""
    seeds = [s if isinstance(s, Seed) else Seed(url=s, topic=None) for s in seeds]
    if not seeds:
        raise UsageError("crawl needs at least one seed")
    prefetched = prefetched or {}

    result = CrawlResult(seeds=seeds)
    discovered: set[str] = set()
    landed: dict[str, str] = {}
    frontier: List[str] = []
    for seed in seeds:
        if seed.url not in discovered:
            discovered.add(seed.url)
            frontier.append(seed.url)

    pool = ThreadPoolExecutor(max_workers=policy.workers) if policy.workers > 1 else None
    try:
        for hop in range(policy.max_hops + 1):
            if not frontier:
                break
            budget = policy.max_pages - len(result.pages)
            if budget <= 0:
                logger.warning("page limit %d reached at hop %d", policy.max_pages, hop)
                break
            if len(frontier) > budget:
                logger.warning("hop %d: truncating frontier from %d to %d pages", hop, len(frontier), budget)
                frontier = frontier[:budget]
            logger.info("hop %d: %d URLs in frontier", hop, len(frontier))

            def fetch(url: str) -> FetchResult:
                return prefetched[url] if url in prefetched else fetcher.fetch(url)

            responses = pool.map(fetch, frontier) if pool is not None else map(fetch, frontier)
            next_frontier: List[str] = []
            for url, response in tqdm(
                zip(frontier, responses), total=len(frontier), desc=f"hop {hop}", disable=not progress
            ):
                result.responses[url] = response
                if not response.ok:
                    logger.warning("skipping %s: %s", url, response.error)
                    result.skipped[url] = response.error or "unknown error"
                    continue

                owner = landed.setdefault(response.final_url, url)
                if owner != url:
                    logger.info("%s redirects onto %s, already crawled as %s", url, response.final_url, owner)
                    result.aliases[url] = owner
                    continue
                discovered.add(response.final_url)
                content = extract_page(response.html, response.final_url, policy.link_classes, policy.wiki_host_suffix)
                result.pages[url] = CrawledPage(
                    url=url,
                    final_url=response.final_url,
                    hop=hop,
                    title=content.title,
                    text=content.text,
                    source=source_of(url, policy.wiki_host_suffix),
                    fetched_at=clock(),
                    malformed=content.malformed,
                )
                if hop == policy.max_hops:
                    continue
                for dst, link_class in content.links:
                    if dst == url:
                        continue
                    result.edges.append(Edge(src=url, dst=dst, link_class=link_class))
                    if dst not in discovered:
                        discovered.add(dst)
                        next_frontier.append(dst)
            frontier = next_frontier
    finally:
        if pool is not None:
            pool.shutdown()

    if result.aliases:
        result.edges = _merge_aliases(result.edges, result.aliases)

    logger.info("crawl finished: %d pages, %d edges, %d skipped", len(result.pages), len(result.edges), len(result.skipped))
    return result
