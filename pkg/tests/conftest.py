from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
import pytest
import requests

from tests.fixture_server import RANDOM_PATH, WIKI, FixtureServer, default_site
from vivada.config import CrawlPolicy
from vivada.corpus import Dataset, FetchResult, HttpFetcher, write_splits
from vivada.corpus.dataset import SPLITS_FILE
from vivada.models import DatasetSplit, Document, Label, Partition, Source, document_id, source_of

FETCHED_AT = datetime(2024, 1, 1, tzinfo=timezone.utc)


def make_doc(
    url: str,
    text: str,
    label: Label = Label.CONTROVERSIAL,
    hop: int = 0,
    topic: Optional[str] = None,
    year: int = 2024,
    source: Optional[Source] = None,
) -> Document:
    return Document(
        id=document_id(url),
        url=url,
        title=url.rsplit("/", 1)[-1],
        text=text,
        label=label,
        source=source or source_of(url),
        hop=hop,
        topic=topic,
        snapshot_year=year,
        fetched_at=FETCHED_AT,
    )


def separable_corpus(n: int = 12, seed: int = 0) -> list[Document]:
    """Controversial pages talk about dispute, the rest about gardening."""
    rng = np.random.default_rng(seed)
    hot = ["dispute", "protest", "debate", "conflict", "scandal", "accusation"]
    calm = ["garden", "flower", "recipe", "river", "museum", "bridge"]
    shared = ["the", "city", "people", "year"]
    docs = []
    for i in range(n):
        positive = i % 2 == 0
        words = rng.choice(hot if positive else calm, size=8).tolist() + rng.choice(shared, size=4).tolist()
        text = " ".join(words[:6]) + ". " + " ".join(words[6:]) + "."
        docs.append(
            make_doc(
                f"http://en.wikipedia.org/wiki/Page_{i}",
                text,
                Label.CONTROVERSIAL if positive else Label.NON_CONTROVERSIAL,
                topic=f"topic-{i % 4}",
            )
        )
    return docs


class DictFetcher:
    """Serves pages from a dict; anything missing is a 404."""

    def __init__(self, pages: dict[str, str], redirects: Optional[dict[str, str]] = None):
        self.pages = pages
        self.redirects = redirects or {}
        self.requested: list[str] = []

    def fetch(self, url: str) -> FetchResult:
        self.requested.append(url)
        final = self.redirects.get(url, url)
        if final in self.pages:
            return FetchResult(url=url, final_url=final, status=200, html=self.pages[final])
        return FetchResult(url=url, final_url=final, status=404, error="not found")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def corpus():
    return separable_corpus()


@pytest.fixture
def fixture_policy():
    return CrawlPolicy(host_delay=0.0, retries=0, timeout=5.0, random_article_url=WIKI + RANDOM_PATH)


@pytest.fixture
def fixture_web():
    with FixtureServer(default_site(seed=0)) as server:
        yield server


@pytest.fixture
def http_fetcher(fixture_web, fixture_policy):
    session = requests.Session()
    # environment proxies would otherwise take precedence over the fixture proxy
    session.trust_env = False
    return HttpFetcher(fixture_policy, session=session, proxies={"http": fixture_web.url, "https": fixture_web.url})


def write_split_dataset(directory, seed: int = 0, web_test: bool = True, year: int = 2024) -> dict[Partition, list[Document]]:
    """A separable corpus on disk with a splits file: Wikipedia train/validation, mixed test."""
    docs = [replace(d, snapshot_year=year) for d in separable_corpus(30, seed=seed)]
    train, validation, rest = docs[:18], docs[18:22], docs[22:]
    test = rest[:4]
    for i, d in enumerate(rest[4:]):
        url = f"http://web{i}.example.com/article" if web_test else f"http://en.wikipedia.org/wiki/Extra_{i}"
        test.append(make_doc(url, d.text, d.label, hop=1, topic=d.topic, year=year))
    parts = {Partition.TRAIN: train, Partition.VALIDATION: validation, Partition.TEST: test}

    Dataset(documents=[d for part in parts.values() for d in part], edges=[], seeds=[]).write(directory)
    write_splits(
        Path(directory) / SPLITS_FILE,
        {p: DatasetSplit(p, seed_urls=[d.url for d in part], document_ids=[d.id for d in part]) for p, part in parts.items()},
        seed,
    )
    return parts


@pytest.fixture
def dataset_dir(tmp_path):
    directory = tmp_path / "dataset"
    directory.mkdir()
    write_split_dataset(directory)
    return directory
