import logging
from typing import List, Optional
from urllib.parse import quote

from parsimonious.exceptions import ParseError as GrammarError
from parsimonious.nodes import NodeVisitor

from vivada.constants import DEFAULT_WIKI_BASE, WIKI_NAMESPACES
from vivada.errors import ParseError
from vivada.models import Polarity, Seed
from vivada.parsing.grammars import SEED_LIST_GRAMMAR
from vivada.strings import squash

logger = logging.getLogger(__name__)


def article_url(title: str, base_url: str = DEFAULT_WIKI_BASE) -> str:
    title = squash(title.split("#", 1)[0]).replace(" ", "_")
    title = title[:1].upper() + title[1:]
    path = quote(title, safe=":/(),'!-._~")
    return f"{base_url.rstrip('/')}/wiki/{path}"


def is_article(target: str) -> bool:
    target = target.lstrip(":")
    if not target or target.startswith("#"):
        return False
    prefix, sep, _ = target.partition(":")
    return not (sep and prefix.strip().lower() in WIKI_NAMESPACES)


class SeedListVisitor(NodeVisitor):
    source: str
    base_url: str

    def __init__(self, source: str, base_url: str = DEFAULT_WIKI_BASE, path: Optional[str] = None):
        NodeVisitor.__init__(self)
        source = source.replace("\r\n", "\n")
        self.source = source if source.endswith("\n") else source + "\n"
        self.base_url = base_url
        self.path = path

    @classmethod
    def from_file(cls, file: str, base_url: str = DEFAULT_WIKI_BASE) -> "SeedListVisitor":
        logger.info("loading seed list %s", file)
        with open(file, encoding="utf-8") as f:
            return cls(f.read(), base_url, path=file)

    def parse(self) -> List[Seed]:
        try:
            tree = SEED_LIST_GRAMMAR.parse(self.source)
        except GrammarError as e:
            raise ParseError(f"unreadable seed list: {e}", line=e.line(), path=self.path) from e
        return self.visit(tree)

    # -- top level ----------------------------------------------------------

    def visit_page(self, _, visited_children):
        lines = visited_children if isinstance(visited_children, list) else []
        topic: Optional[str] = None
        seeds: List[Seed] = []
        seen: set[str] = set()
        for entry in lines:
            match entry:
                case ("heading", text):
                    topic = text
                case ("links", targets):
                    for target in targets:
                        if not is_article(target):
                            continue
                        url = article_url(target.lstrip(":"), self.base_url)
                        if url in seen:
                            continue
                        seen.add(url)
                        seeds.append(Seed(url=url, topic=topic, polarity=Polarity.CONTROVERSIAL))
        logger.info("seed list: %d seeds", len(seeds))
        return seeds

    def visit_line(self, _, visited_children):
        entry, _ = visited_children
        return entry

    def visit_entry(self, _, visited_children):
        return visited_children[0]

    # -- headings -----------------------------------------------------------

    def visit_heading(self, _, visited_children):
        _, text, _, _ = visited_children
        return ("heading", text)

    def visit_heading_text(self, node, _):
        return squash(node.text)

    def visit_subheading(self, *_):
        return None

    # -- items --------------------------------------------------------------

    def visit_item(self, _, visited_children):
        _, pieces = visited_children
        if not isinstance(pieces, list):
            pieces = []
        return ("links", [p for p in pieces if isinstance(p, str)])

    def visit_item_piece(self, _, visited_children):
        return visited_children[0]

    def visit_link(self, _, visited_children):
        _, target, _, _ = visited_children
        return target

    def visit_target(self, node, _):
        return node.text.strip()

    def visit_text_run(self, *_):
        return None

    def visit_stray(self, *_):
        return None

    def visit_other(self, *_):
        return None

    def generic_visit(self, node, visited_children):
        return visited_children or node
