import logging
from typing import AbstractSet, List, Optional

from vivada.config import CrawlPolicy
from vivada.corpus.crawler import crawl_snowball
from vivada.corpus.fetcher import Fetcher, FetchResult
from vivada.corpus.labels import propagate_labels
from vivada.errors import CrawlExhaustedError, UsageError
from vivada.models import Document, Polarity, Seed

logger = logging.getLogger(__name__)


def draw_random_seeds(
    fetcher: Fetcher,
    n: int,
    policy: CrawlPolicy,
    exclude: AbstractSet[str] = frozenset(),
    responses: Optional[dict[str, FetchResult]] = None,
) -> List[Seed]:
    """`n` distinct articles from the random-article endpoint, none of them in `exclude`.

    Fetched pages are stored in `responses` (keyed by resolved URL) so a
    later crawl need not fetch them again.
    """
    if n <= 0:
        raise UsageError("number of negatives must be positive")

    seeds: List[Seed] = []
    chosen: set[str] = set()
    limit = n * policy.negative_attempts
    attempts = 0
    while len(seeds) < n:
        if attempts >= limit:
            raise CrawlExhaustedError(
                f"found only {len(seeds)} of {n} distinct random articles after {attempts} attempts"
            )
        attempts += 1
        result = fetcher.fetch(policy.random_article_url)
        if not result.ok:
            logger.warning("random article request failed: %s", result.error)
            continue
        url = result.final_url
        if url in exclude or url in chosen:
            logger.info("random article %s already taken, resampling", url)
            continue
        chosen.add(url)
        seeds.append(Seed(url=url, topic=None, polarity=Polarity.RANDOM_NEGATIVE))
        if responses is not None:
            responses[url] = FetchResult(url=url, final_url=url, status=result.status, html=result.html)
    return seeds


def sample_negatives(
    fetcher: Fetcher,
    n: int,
    policy: CrawlPolicy,
    snapshot_year: int,
    exclude: AbstractSet[str] = frozenset(),
) -> List[Document]:
    """Random-article seeds plus their neighbourhoods, labelled non-controversial."""
    responses: dict[str, FetchResult] = {}
    seeds = draw_random_seeds(fetcher, n, policy, exclude, responses)
    crawl = crawl_snowball(seeds, policy, fetcher, prefetched=responses)
    return propagate_labels(crawl.pages, crawl.edges, seeds, snapshot_year, policy.max_hops)
