import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Union

from vivada import constants as C
from vivada.errors import UsageError
from vivada.models.document import Document
from vivada.text.tokenize import tokenize
from vivada.util import sha256_hex

logger = logging.getLogger(__name__)

RESERVED = (C.PAD_TOKEN, C.OOV_TOKEN)


@dataclass
class Vocabulary:
    tokens: List[str]
    counts: dict[str, int] = field(default_factory=dict)
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        if tuple(self.tokens[: len(RESERVED)]) != RESERVED:
            raise ValueError(f"vocabulary must start with {RESERVED}")
        self.index = {token: i for i, token in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("vocabulary tokens must be distinct")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index and self.index[token] >= len(RESERVED)

    def lookup(self, token: str) -> int:
        return self.index.get(token, C.OOV_INDEX)

    def words(self) -> List[str]:
        return self.tokens[len(RESERVED) :]

    def hash(self) -> str:
        return sha256_hex("\n".join(self.tokens))

    def extended(self, words: Iterable[str], max_size: int = C.VOCAB_MAX_SIZE) -> "Vocabulary":
        """A copy with unseen `words` appended in order, up to `max_size` entries; counts stay as built."""
        tokens = list(self.tokens)
        known = set(tokens)
        for word in words:
            if len(tokens) >= max_size:
                break
            if word not in known:
                tokens.append(word)
                known.add(word)
        return Vocabulary(tokens=tokens, counts=dict(self.counts))

    @classmethod
    def from_tokens(cls, tokens: Sequence[str]) -> "Vocabulary":
        return cls(tokens=list(tokens))


def build_vocabulary(
    corpus: Iterable[Union[Document, str]],
    max_size: int = C.VOCAB_MAX_SIZE,
    min_freq: int = C.VOCAB_MIN_FREQ,
) -> Vocabulary:
    """Most frequent tokens first, ties lexicographic; the two reserved slots count toward `max_size`."""
    if max_size < len(RESERVED):
        raise UsageError(f"max_size must leave room for the {len(RESERVED)} reserved tokens")

    counts: Counter[str] = Counter()
    seen = 0
    for item in corpus:
        counts.update(tokenize(item.text if isinstance(item, Document) else item))
        seen += 1
    if seen == 0:
        raise UsageError("cannot build a vocabulary from an empty corpus")

    ranked = sorted(
        ((token, n) for token, n in counts.items() if n >= min_freq and token not in RESERVED),
        key=lambda pair: (-pair[1], pair[0]),
    )[: max_size - len(RESERVED)]

    logger.info("vocabulary: %d of %d distinct tokens kept", len(ranked), len(counts))
    return Vocabulary(
        tokens=[*RESERVED, *(token for token, _ in ranked)],
        counts=dict(ranked),
    )
