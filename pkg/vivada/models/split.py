from dataclasses import dataclass, field
from typing import Any, Iterable, List

from vivada.models.document import Document
from vivada.models.enums import Label, Partition, Source


@dataclass
class SplitStats:
    seeds: int
    total: int
    controversial: int
    general_web: int


@dataclass
class DatasetSplit:
    """One named partition: the seeds assigned to it and every page in their neighbourhoods.

    `seed_urls` holds the controversial seeds only; random-negative seeds dealt
    to the partition are kept in `negative_seed_urls`.
    """

    partition: Partition
    seed_urls: List[str] = field(default_factory=list)
    negative_seed_urls: List[str] = field(default_factory=list)
    document_ids: List[str] = field(default_factory=list)

    def stats(self, documents: Iterable[Document]) -> SplitStats:
        members = set(self.document_ids)
        docs = [d for d in documents if d.id in members]
        return SplitStats(
            seeds=len(self.seed_urls),
            total=len(docs),
            controversial=sum(d.label is Label.CONTROVERSIAL for d in docs),
            general_web=sum(d.source is Source.GENERAL_WEB for d in docs),
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "seeds": list(self.seed_urls),
            "negative_seeds": list(self.negative_seed_urls),
            "ids": list(self.document_ids),
        }

    @classmethod
    def from_record(cls, partition: Partition, record: dict[str, Any]) -> "DatasetSplit":
        return cls(
            partition=partition,
            seed_urls=list(record.get("seeds", [])),
            negative_seed_urls=list(record.get("negative_seeds", [])),
            document_ids=list(record.get("ids", [])),
        )
