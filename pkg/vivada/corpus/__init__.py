from vivada.corpus.fetcher import FetchResult, Fetcher, HttpFetcher
from vivada.corpus.extract import PageContent, extract_page, section_links
from vivada.corpus.crawler import CrawlResult, CrawledPage, crawl_snowball
from vivada.corpus.labels import nearest_seed, propagate_labels
from vivada.corpus.negatives import draw_random_seeds, sample_negatives
from vivada.corpus.dataset_io import (
    read_annotations,
    read_documents,
    read_edges,
    read_seeds,
    read_splits,
    write_documents,
    write_edges,
    write_seeds,
    write_splits,
)
from vivada.corpus.dataset import Dataset, build_dataset
from vivada.corpus.splits import dataset_stats, split_dataset
