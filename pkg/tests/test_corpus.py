import json
from collections import deque
from datetime import datetime, timezone

import numpy as np
import pytest

from tests.conftest import DictFetcher, make_doc
from tests.fixture_server import WIKI, wiki_page, wiki_url
from vivada.config import CrawlPolicy
from vivada.corpus import (
    CrawledPage,
    Dataset,
    HttpFetcher,
    build_dataset,
    crawl_snowball,
    dataset_stats,
    draw_random_seeds,
    extract_page,
    propagate_labels,
    read_annotations,
    read_documents,
    read_splits,
    sample_negatives,
    split_dataset,
    write_documents,
    write_splits,
)
from vivada.errors import CrawlExhaustedError, IntegrityError, ParseError, SchemaVersionError, UsageError
from vivada.models import Edge, Label, Partition, Polarity, Seed, Source


# -- extraction -------------------------------------------------------------


def test_extract_page_classifies_section_links():
    html = wiki_page(
        "Abortion",
        ["First paragraph.", "Second paragraph."],
        see_also=["Gun_control", "Category:Disputes"],
        references=["http://news.example.com/story", "/wiki/Roe_v._Wade#Ruling"],
        external=["http://blog.example.org/post", "mailto:someone@example.com"],
    )
    page = extract_page(html, wiki_url("Abortion"))
    assert page.title == "Abortion"
    assert "First paragraph." in page.text
    assert "var x" not in page.text
    assert page.links == [
        (wiki_url("Gun_control"), "see-also"),
        ("http://news.example.com/story", "references"),
        (wiki_url("Roe_v._Wade"), "references"),
        ("http://blog.example.org/post", "external-links"),
    ]
    assert not page.malformed


def test_see_also_drops_non_wiki_targets():
    html = (
        "<html><body><h1>T</h1><p>x</p><h2>See also</h2>"
        '<ul><li><a href="http://elsewhere.example.com/">out</a></li>'
        '<li><a href="/wiki/Inside">in</a></li></ul></body></html>'
    )
    assert extract_page(html, wiki_url("T")).links == [(wiki_url("Inside"), "see-also")]


def test_link_classes_are_configurable():
    html = wiki_page("T", ["x"], see_also=["A"], references=["http://r.example.com/"])
    page = extract_page(html, wiki_url("T"), link_classes=frozenset({"references"}))
    assert page.links == [("http://r.example.com/", "references")]


def test_general_web_pages_contribute_no_links():
    html = wiki_page("T", ["x"], see_also=["A"])
    assert extract_page(html, "http://news.example.com/t").links == []


def test_malformed_html_falls_back_to_text():
    page = extract_page("just some <b>bare words", "http://x.example.com/")
    assert page.malformed
    assert page.text == "just some bare words"


# -- crawling ---------------------------------------------------------------


def _random_web(rng: np.random.Generator, n: int = 15):
    titles = [f"N{i}" for i in range(n)]
    links = {}
    for t in titles:
        targets = rng.choice(titles, size=rng.integers(0, 4), replace=False)
        links[wiki_url(t)] = [wiki_url(u) for u in targets]
    missing = {wiki_url(t) for t in rng.choice(titles, size=2, replace=False)}
    pages = {
        url: wiki_page(url.rsplit("/", 1)[-1], ["text"], see_also=[u.rsplit("/", 1)[-1] for u in targets])
        for url, targets in links.items()
        if url not in missing
    }
    return links, pages


def _bfs_hops(links: dict[str, list[str]], present: set[str], seeds: list[str], max_hops: int) -> dict[str, int]:
    dist = {s: 0 for s in seeds}
    queue = deque(seeds)
    while queue:
        url = queue.popleft()
        if url not in present:
            continue
        for dst in links[url]:
            if dst not in dist and dst != url:
                dist[dst] = dist[url] + 1
                queue.append(dst)
    return {url: d for url, d in dist.items() if d <= max_hops and url in present}


@pytest.mark.parametrize("graph_seed", range(20))
def test_crawl_matches_breadth_first_search(graph_seed):
    rng = np.random.default_rng(graph_seed)
    links, pages = _random_web(rng)
    seeds = list(dict.fromkeys(rng.choice(sorted(links), size=2).tolist()))
    fetcher = DictFetcher(pages)
    policy = CrawlPolicy(max_hops=2, host_delay=0.0)

    result = crawl_snowball(seeds, policy, fetcher)

    expected = _bfs_hops(links, set(pages), seeds, policy.max_hops)
    assert result.hops() == expected
    assert len(fetcher.requested) == len(set(fetcher.requested))
    for edge in result.edges:
        assert result.pages[edge.src].hop < policy.max_hops
    assert set(result.skipped) <= set(links) - set(pages)


def test_crawl_stops_at_max_hops():
    pages = {
        wiki_url("A"): wiki_page("A", ["a"], see_also=["B"]),
        wiki_url("B"): wiki_page("B", ["b"], see_also=["C"]),
        wiki_url("C"): wiki_page("C", ["c"], see_also=["D"]),
        wiki_url("D"): wiki_page("D", ["d"]),
    }
    fetcher = DictFetcher(pages)
    result = crawl_snowball([wiki_url("A")], CrawlPolicy(max_hops=2), fetcher)
    assert result.hops() == {wiki_url("A"): 0, wiki_url("B"): 1, wiki_url("C"): 2}
    assert wiki_url("D") not in fetcher.requested


def test_crawl_is_the_same_with_worker_threads(rng):
    links, pages = _random_web(rng)
    seeds = sorted(pages)[:3]
    serial = crawl_snowball(seeds, CrawlPolicy(), DictFetcher(pages))
    threaded = crawl_snowball(seeds, CrawlPolicy(workers=4), DictFetcher(pages))
    assert serial.hops() == threaded.hops()
    assert serial.edges == threaded.edges


def test_crawl_keeps_one_page_per_redirect_target():
    pages = {
        wiki_url("A"): wiki_page("A", ["a"], see_also=["Gun_law", "Gun_laws", "Target"]),
        wiki_url("Target"): wiki_page("Target", ["t"]),
    }
    redirects = {wiki_url("Gun_law"): wiki_url("Target"), wiki_url("Gun_laws"): wiki_url("Target")}
    fetcher = DictFetcher(pages, redirects)
    result = crawl_snowball([wiki_url("A")], CrawlPolicy(max_hops=1), fetcher)

    assert result.hops() == {wiki_url("A"): 0, wiki_url("Gun_law"): 1}
    assert result.pages[wiki_url("Gun_law")].final_url == wiki_url("Target")
    assert result.aliases == {wiki_url("Gun_laws"): wiki_url("Gun_law"), wiki_url("Target"): wiki_url("Gun_law")}
    assert [(e.src, e.dst) for e in result.edges] == [(wiki_url("A"), wiki_url("Gun_law"))]


def test_crawl_needs_seeds():
    with pytest.raises(UsageError):
        crawl_snowball([], CrawlPolicy(), DictFetcher({}))


# -- labelling --------------------------------------------------------------


def _page(url: str, hop: int = 0) -> CrawledPage:
    return CrawledPage(
        url=url,
        final_url=url,
        hop=hop,
        title=url,
        text=f"text of {url}",
        source=Source.WIKIPEDIA,
        fetched_at=datetime(2024, 1, 1, tzinfo=timezone.utc),
    )


def test_positive_seed_reach_dominates():
    urls = {name: wiki_url(name) for name in ("P", "A", "B", "N", "C")}
    pages = {url: _page(url) for url in urls.values()}
    edges = [
        Edge(urls["P"], urls["A"], "see-also"),
        Edge(urls["A"], urls["B"], "see-also"),
        Edge(urls["N"], urls["B"], "see-also"),
        Edge(urls["N"], urls["C"], "see-also"),
    ]
    seeds = [
        Seed(urls["P"], "Politics"),
        Seed(urls["N"], None, Polarity.RANDOM_NEGATIVE),
    ]
    docs = {d.url: d for d in propagate_labels(pages, edges, seeds, snapshot_year=2018)}

    assert docs[urls["B"]].label is Label.CONTROVERSIAL
    assert docs[urls["B"]].topic == "Politics"
    assert docs[urls["B"]].hop == 1
    assert docs[urls["C"]].label is Label.NON_CONTROVERSIAL
    assert docs[urls["N"]].label is Label.NON_CONTROVERSIAL
    assert docs[urls["P"]].is_seed
    assert all(d.snapshot_year == 2018 for d in docs.values())


def test_unreachable_page_is_an_integrity_error():
    pages = {wiki_url("P"): _page(wiki_url("P")), wiki_url("Lost"): _page(wiki_url("Lost"))}
    with pytest.raises(IntegrityError):
        propagate_labels(pages, [], [Seed(wiki_url("P"), None)], 2018)


# -- negatives --------------------------------------------------------------


def test_random_seeds_exclude_and_exhaust():
    random_url = WIKI + "/wiki/Special:Random"
    policy = CrawlPolicy(random_article_url=random_url, negative_attempts=3)
    fetcher = DictFetcher({wiki_url("Garden"): wiki_page("Garden", ["g"])}, {random_url: wiki_url("Garden")})

    seeds = draw_random_seeds(fetcher, 1, policy)
    assert [(s.url, s.polarity) for s in seeds] == [(wiki_url("Garden"), Polarity.RANDOM_NEGATIVE)]

    with pytest.raises(CrawlExhaustedError):
        draw_random_seeds(fetcher, 1, policy, exclude={wiki_url("Garden")})
    with pytest.raises(CrawlExhaustedError):
        draw_random_seeds(fetcher, 2, policy)


def test_sample_negatives_through_fixture_web(http_fetcher, fixture_policy):
    docs = sample_negatives(http_fetcher, 2, fixture_policy, snapshot_year=2024)
    assert docs
    assert all(d.label is Label.NON_CONTROVERSIAL for d in docs)
    assert len([d for d in docs if d.is_seed]) == 2


# -- HTTP fetching ----------------------------------------------------------


def test_http_fetcher_fetches_through_proxy(http_fetcher):
    result = http_fetcher.fetch(wiki_url("Abortion"))
    assert result.ok
    assert result.status == 200
    assert "Abortion" in result.html


def test_http_fetcher_follows_random_redirect(http_fetcher, fixture_policy):
    result = http_fetcher.fetch(fixture_policy.random_article_url)
    assert result.ok
    assert result.final_url in {wiki_url("Garden"), wiki_url("River"), wiki_url("Museum")}


def test_http_fetcher_respects_robots(http_fetcher, fixture_web):
    blocked = http_fetcher.fetch("http://news.example.com/private/leak")
    assert not blocked.ok and "robots" in blocked.error
    assert "http://news.example.com/private/leak" not in fixture_web.requested

    assert http_fetcher.fetch("http://news.example.com/story").ok
    # 403 on robots.txt means the whole host is off limits
    assert "robots" in http_fetcher.fetch("http://paywall.example.com/article").error


def test_http_fetcher_errors(http_fetcher):
    missing = http_fetcher.fetch(wiki_url("Nowhere"))
    assert missing.status == 404 and not missing.ok
    pdf = http_fetcher.fetch("http://blog.example.org/report.pdf")
    assert not pdf.ok and "not HTML" in pdf.error


def test_http_fetcher_spaces_requests_per_host():
    waits = []
    now = [0.0]
    policy = CrawlPolicy(host_delay=2.0, respect_robots=False)
    http = HttpFetcher(policy, sleep=waits.append, clock=lambda: now[0])
    http._wait_for("a.example.com")
    http._wait_for("a.example.com")
    http._wait_for("b.example.com")
    assert waits == [2.0]


# -- end to end crawl -------------------------------------------------------


def test_build_dataset_from_fixture_web(http_fetcher, fixture_policy, tmp_path):
    seeds = [Seed(wiki_url("Abortion"), "Politics")]
    dataset = build_dataset(seeds, fixture_policy, http_fetcher, n_negatives=2, snapshot_year=2024, out_dir=tmp_path)
    by_url = {d.url: d for d in dataset.documents}

    assert by_url[wiki_url("Abortion")].hop == 0
    assert by_url[wiki_url("Gun_control")].hop == 1
    assert by_url[wiki_url("Capital_punishment")].hop == 2
    assert by_url["http://news.example.com/story"].source is Source.GENERAL_WEB
    for url in (wiki_url("Abortion"), wiki_url("Gun_control"), "http://blog.example.org/post"):
        assert by_url[url].label is Label.CONTROVERSIAL
        assert by_url[url].topic == "Politics"
    assert "http://news.example.com/private/leak" in dataset.skipped
    assert "http://blog.example.org/report.pdf" in dataset.skipped
    assert "http://paywall.example.com/article" not in by_url

    negatives = [s for s in dataset.seeds if s.polarity is Polarity.RANDOM_NEGATIVE]
    assert len(negatives) == 2
    assert all(by_url[s.url].label is Label.NON_CONTROVERSIAL for s in negatives)

    back = Dataset.read(tmp_path)
    assert back.documents == dataset.documents
    assert back.edges == dataset.edges
    assert back.seeds == dataset.seeds


# -- splits -----------------------------------------------------------------


def _toy_dataset():
    docs, edges, seeds = [], [], []
    for i in range(4):
        seed_url = wiki_url(f"Hot{i}")
        seeds.append(Seed(seed_url, f"topic{i}"))
        docs.append(make_doc(seed_url, "dispute", Label.CONTROVERSIAL, topic=f"topic{i}"))
        for j in range(2):
            url = f"http://web{i}.example.com/{j}"
            edges.append(Edge(seed_url, url, "references"))
            docs.append(make_doc(url, "argument", Label.CONTROVERSIAL, hop=1, topic=f"topic{i}"))
    for i in range(2):
        seed_url = wiki_url(f"Calm{i}")
        seeds.append(Seed(seed_url, None, Polarity.RANDOM_NEGATIVE))
        docs.append(make_doc(seed_url, "garden", Label.NON_CONTROVERSIAL))
        url = wiki_url(f"Calm{i}_more")
        edges.append(Edge(seed_url, url, "see-also"))
        docs.append(make_doc(url, "flower", Label.NON_CONTROVERSIAL, hop=1))
    return docs, edges, seeds


COUNTS = {Partition.TRAIN: 2, Partition.VALIDATION: 1, Partition.TEST: 1}


def test_split_keeps_neighbourhoods_together():
    docs, edges, seeds = _toy_dataset()
    splits = split_dataset(docs, edges, seeds, COUNTS, rng_seed=7)

    ids = [doc_id for split in splits.values() for doc_id in split.document_ids]
    assert len(ids) == len(set(ids)) == len(docs)

    where = {doc_id: p for p, split in splits.items() for doc_id in split.document_ids}
    by_url = {d.url: d for d in docs}
    for edge in edges:
        assert where[by_url[edge.src].id] == where[by_url[edge.dst].id]

    hot = {p: sum(by_url[u].topic is not None for u in split.seed_urls) for p, split in splits.items()}
    assert hot == {Partition.TRAIN: 2, Partition.VALIDATION: 1, Partition.TEST: 1}


def test_split_is_deterministic():
    docs, edges, seeds = _toy_dataset()
    a = split_dataset(docs, edges, seeds, COUNTS, rng_seed=3)
    b = split_dataset(docs, edges, seeds, COUNTS, rng_seed=3)
    assert {p: s.document_ids for p, s in a.items()} == {p: s.document_ids for p, s in b.items()}


def test_split_errors():
    docs, edges, seeds = _toy_dataset()
    with pytest.raises(UsageError):
        split_dataset(docs, edges, seeds, {Partition.TRAIN: 5}, rng_seed=0)
    with pytest.raises(IntegrityError):
        split_dataset(docs, edges, seeds + seeds[:1], COUNTS, rng_seed=0)


def test_dataset_stats_rows():
    docs, edges, seeds = _toy_dataset()
    splits = split_dataset(docs, edges, seeds, {Partition.TRAIN: 4}, rng_seed=0)
    rows = dataset_stats(splits, docs)
    # the two random-negative seeds go to train as well, but only controversial seeds are counted
    assert rows[0] == ("Train", 4, 16, "12 (75%)", "8 (50%)")
    assert len(splits[Partition.TRAIN].negative_seed_urls) == 2
    assert rows[2] == ("Test", 0, 0, "0 (0%)", "0 (0%)")


def test_splits_file_round_trip(tmp_path):
    docs, edges, seeds = _toy_dataset()
    splits = split_dataset(docs, edges, seeds, COUNTS, rng_seed=1)
    write_splits(tmp_path / "splits.json", splits, seed=1)
    back = read_splits(tmp_path / "splits.json")
    assert {p: s.document_ids for p, s in back.items()} == {p: s.document_ids for p, s in splits.items()}
    assert json.loads((tmp_path / "splits.json").read_text())["seed"] == 1


# -- persistence ------------------------------------------------------------


def test_documents_round_trip(tmp_path):
    docs, _, _ = _toy_dataset()
    path = tmp_path / "documents.jsonl"
    assert write_documents(path, docs) == len(docs)
    assert list(read_documents(path)) == docs


def test_documents_schema_version(tmp_path):
    path = tmp_path / "documents.jsonl"
    path.write_text('{"schema_version": 99}\n', encoding="utf-8")
    with pytest.raises(SchemaVersionError):
        list(read_documents(path))


def test_documents_bad_record_reports_line(tmp_path):
    docs, _, _ = _toy_dataset()
    path = tmp_path / "documents.jsonl"
    write_documents(path, docs[:2])
    with open(path, "a", encoding="utf-8") as f:
        f.write('{"id": "x"}\n')
    with pytest.raises(ParseError) as e:
        list(read_documents(path))
    assert e.value.line == 4


def test_annotations_must_be_on_scale(tmp_path):
    path = tmp_path / "annotations.jsonl"
    path.write_text('{"id": "a", "scores": [1, 2, 4]}\n{"id": "b", "scores": [5]}\n', encoding="utf-8")
    with pytest.raises(ParseError) as e:
        read_annotations(path)
    assert e.value.line == 2
    path.write_text('{"id": "a", "scores": [1, 2, 4]}\n', encoding="utf-8")
    assert read_annotations(path)[0].mean == pytest.approx(7 / 3)
