"""Visible text and classified outlinks from fetched HTML."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional
from urllib.parse import unquote, urldefrag, urljoin, urlsplit

from bs4 import BeautifulSoup, Tag

from vivada import constants as C
from vivada.models import LinkClass, Source, source_of
from vivada.parsing.visitors import is_article
from vivada.strings import slugify_heading, squash

logger = logging.getLogger(__name__)


@dataclass
class PageContent:
    title: str
    text: str
    # (absolute url, link class) in document order, deduplicated
    links: List[tuple[str, str]] = field(default_factory=list)
    malformed: bool = False


def normalize_url(href: str, base: str) -> Optional[str]:
    url, _ = urldefrag(urljoin(base, href.strip()))
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        return None
    return url


def _is_wiki_article(url: str) -> bool:
    parts = urlsplit(url)
    if not parts.path.startswith("/wiki/") or parts.query:
        return False
    return is_article(unquote(parts.path[len("/wiki/") :]))


def _section_heading(tag: Tag) -> Optional[Tag]:
    """The h2 a sibling-walk starts from; newer skins wrap it in a div.mw-heading."""
    parent = tag.parent
    if isinstance(parent, Tag) and parent.name == "div" and "mw-heading" in (parent.get("class") or []):
        return parent
    return tag


def _ends_section(tag: Tag) -> bool:
    if tag.name == "h2":
        return True
    return tag.name == "div" and tag.find("h2") is not None and "mw-heading" in (tag.get("class") or [])


def _visible_text(soup: BeautifulSoup) -> str:
    for name in C.NONTEXT_TAGS:
        for el in soup.find_all(name):
            el.decompose()
    texts = []
    for tag in soup.find_all(C.TEXT_TAGS):
        if tag.find_parent(C.TEXT_TAGS) is not None:
            continue
        text = squash(tag.get_text(" ", strip=True))
        if text:
            texts.append(text)
    return "\n".join(texts)


def _title(soup: BeautifulSoup) -> str:
    heading = soup.find("h1")
    if heading is not None and heading.get_text(strip=True):
        return squash(heading.get_text(" ", strip=True))
    if soup.title is not None and soup.title.string:
        return squash(soup.title.string)
    return ""


def section_links(
    soup: BeautifulSoup,
    base_url: str,
    link_classes: frozenset,
    wiki_host_suffix: str = C.WIKI_HOST_SUFFIX,
) -> List[tuple[str, str]]:
    """Links under the `See also`, `References` and `External links` headings.

    See-also sections only contribute Wikipedia articles; references and
    external links contribute any web page and any Wikipedia article.
    """
    links: List[tuple[str, str]] = []
    seen: set[str] = set()
    for h2 in soup.find_all("h2"):
        link_class = slugify_heading(h2.get_text(" ", strip=True))
        if link_class not in link_classes:
            continue
        for sibling in _section_heading(h2).find_next_siblings():
            if _ends_section(sibling):
                break
            anchors = [sibling] if sibling.name == "a" else sibling.find_all("a", href=True)
            for a in anchors:
                url = normalize_url(a.get("href", ""), base_url)
                if url is None or url in seen or url == base_url:
                    continue
                wiki = source_of(url, wiki_host_suffix) is Source.WIKIPEDIA
                if wiki and not _is_wiki_article(url):
                    continue
                if not wiki and link_class == LinkClass.SEE_ALSO.value:
                    continue
                seen.add(url)
                links.append((url, link_class))
    return links


def extract_page(
    html: str,
    url: str,
    link_classes: frozenset = frozenset(C.LINK_CLASSES),
    wiki_host_suffix: str = C.WIKI_HOST_SUFFIX,
) -> PageContent:
    """Best-effort extraction; pages that do not parse as a document come back flagged."""
    try:
        soup = BeautifulSoup(html, "html.parser")
    except Exception as e:  # bs4 surfaces parser failures as assorted exception types
        logger.warning("malformed HTML at %s: %s", url, e)
        return PageContent(title="", text=squash(C.TAG_RE.sub(" ", html)), malformed=True)

    malformed = soup.find("body") is None and soup.find(C.TEXT_TAGS) is None
    links = []
    if source_of(url, wiki_host_suffix) is Source.WIKIPEDIA:
        links = section_links(soup, url, link_classes, wiki_host_suffix)
    title = _title(soup)
    text = _visible_text(soup)
    if not text:
        text = squash(soup.get_text(" ", strip=True))
        malformed = malformed or bool(text)
    if malformed:
        logger.warning("malformed HTML at %s, used best-effort text", url)
    return PageContent(title=title, text=text, links=links, malformed=malformed)
