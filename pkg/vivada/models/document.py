from dataclasses import dataclass
from datetime import datetime
from typing import Any, Optional
from urllib.parse import urlsplit

from vivada.models.enums import Label, Source
from vivada.util import sha256_hex

FIELDS = (
    "id",
    "url",
    "title",
    "text",
    "label",
    "source",
    "hop",
    "topic",
    "snapshot_year",
    "fetched_at",
)


def document_id(url: str) -> str:
    return sha256_hex(url)[:16]


def source_of(url: str, wiki_host_suffix: str = "wikipedia.org") -> Source:
    host = (urlsplit(url).hostname or "").lower()
    if host == wiki_host_suffix or host.endswith("." + wiki_host_suffix):
        return Source.WIKIPEDIA
    return Source.GENERAL_WEB


@dataclass(frozen=True)
class Document:
    """One web page with its weak label and where it came from."""

    id: str
    url: str
    title: str
    text: str
    label: Label
    source: Source
    hop: int
    topic: Optional[str]
    snapshot_year: int
    fetched_at: datetime

    def __post_init__(self):
        if not 0 <= self.hop <= 2:
            raise ValueError(f"hop must be 0, 1 or 2, got {self.hop}")
        if self.fetched_at.tzinfo is None:
            raise ValueError("fetched_at must carry a timezone")

    @property
    def is_seed(self) -> bool:
        return self.hop == 0

    @property
    def y(self) -> int:
        return self.label.numeric

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "url": self.url,
            "title": self.title,
            "text": self.text,
            "label": self.label.value,
            "source": self.source.value,
            "hop": self.hop,
            "topic": self.topic,
            "snapshot_year": self.snapshot_year,
            "fetched_at": self.fetched_at.isoformat(),
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "Document":
        missing = [name for name in FIELDS if name not in record]
        if missing:
            raise ValueError(f"missing field(s): {', '.join(missing)}")
        extra = sorted(set(record) - set(FIELDS))
        if extra:
            raise ValueError(f"unexpected field(s): {', '.join(extra)}")
        if not isinstance(record["hop"], int) or not isinstance(record["snapshot_year"], int):
            raise ValueError("hop and snapshot_year must be integers")
        if record["topic"] is not None and not isinstance(record["topic"], str):
            raise ValueError("topic must be a string or null")
        return cls(
            id=str(record["id"]),
            url=str(record["url"]),
            title=str(record["title"]),
            text=str(record["text"]),
            label=Label.parse(record["label"]),
            source=Source.parse(record["source"]),
            hop=record["hop"],
            topic=record["topic"],
            snapshot_year=record["snapshot_year"],
            fetched_at=datetime.fromisoformat(record["fetched_at"]),
        )
