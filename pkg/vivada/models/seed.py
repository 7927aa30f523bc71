from dataclasses import dataclass
from typing import Any, Optional

from vivada.models.enums import Polarity


@dataclass(frozen=True)
class Seed:
    url: str
    topic: Optional[str]
    polarity: Polarity = Polarity.CONTROVERSIAL

    def to_record(self) -> dict[str, Any]:
        return {"url": self.url, "topic": self.topic, "polarity": self.polarity.value}

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "Seed":
        if "url" not in record:
            raise ValueError("missing field: url")
        return cls(
            url=str(record["url"]),
            topic=record.get("topic"),
            polarity=Polarity.parse(record.get("polarity", Polarity.CONTROVERSIAL.value)),
        )


@dataclass(frozen=True)
class Edge:
    """A followed hyperlink, classified by the section it was found in."""

    src: str
    dst: str
    link_class: str

    def to_record(self) -> dict[str, Any]:
        return {"src": self.src, "dst": self.dst, "link_class": self.link_class}

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> "Edge":
        return cls(src=str(record["src"]), dst=str(record["dst"]), link_class=str(record["link_class"]))
