from typing import List

from vivada.constants import DEFAULT_WIKI_BASE
from vivada.models import Seed
from vivada.parsing.grammars import SEED_LIST_GRAMMAR
from vivada.parsing.visitors import SeedListVisitor


def parse_seed_list(wikitext: str, base_url: str = DEFAULT_WIKI_BASE) -> List[Seed]:
    """Controversial seeds from the wikitext of a list page, topic = level-2 section."""
    return SeedListVisitor(wikitext, base_url).parse()
