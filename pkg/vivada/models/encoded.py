from dataclasses import dataclass, field
from typing import List


@dataclass(frozen=True)
class EncodedDocument:
    """Vocabulary indices for one document in both model layouts.

    sentences -- hierarchical form (HAN): non-empty sentences of word indices
    tokens    -- flat form (CNN): right-padded with index 0 to the token limit
    """

    doc_id: str
    sentences: List[List[int]] = field(default_factory=list)
    tokens: List[int] = field(default_factory=list)
    length: int = 0

    @property
    def empty(self) -> bool:
        return self.length == 0
