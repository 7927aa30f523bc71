from enum import Enum


class Label(Enum):
    CONTROVERSIAL = "controversial"
    NON_CONTROVERSIAL = "non-controversial"

    @classmethod
    def parse(cls, text: str) -> "Label":
        return cls(text)

    @property
    def numeric(self) -> int:
        return 1 if self is Label.CONTROVERSIAL else 0


class Source(Enum):
    WIKIPEDIA = "wikipedia"
    GENERAL_WEB = "general-web"

    @classmethod
    def parse(cls, text: str) -> "Source":
        return cls(text)


class Polarity(Enum):
    CONTROVERSIAL = "controversial"
    RANDOM_NEGATIVE = "random-negative"

    @classmethod
    def parse(cls, text: str) -> "Polarity":
        return cls(text)


class LinkClass(Enum):
    SEE_ALSO = "see-also"
    REFERENCES = "references"
    EXTERNAL_LINKS = "external-links"

    @classmethod
    def parse(cls, text: str) -> "LinkClass":
        return cls(text)


class ModelKind(Enum):
    CNN = "cnn"
    HAN = "han"
    TFIDF = "tfidf-margin"
    LM = "lm"

    @classmethod
    def parse(cls, text: str) -> "ModelKind":
        aliases = {
            "cnn": ModelKind.CNN,
            "han": ModelKind.HAN,
            "tfidf": ModelKind.TFIDF,
            "tfidf-margin": ModelKind.TFIDF,
            "tfidf-svm": ModelKind.TFIDF,
            "svm": ModelKind.TFIDF,
            "lm": ModelKind.LM,
        }
        return aliases[text.lower()]

    @property
    def neural(self) -> bool:
        return self in (ModelKind.CNN, ModelKind.HAN)


class ExperimentKind(Enum):
    COMPARISON = "comparison"
    TEMPORAL = "temporal"
    TOPIC = "topic"
    DOMAIN = "domain"
    AGREEMENT = "agreement"

    @classmethod
    def parse(cls, text: str) -> "ExperimentKind":
        aliases = {
            "comparison": ExperimentKind.COMPARISON,
            "baseline-comparison": ExperimentKind.COMPARISON,
            "temporal": ExperimentKind.TEMPORAL,
            "topic": ExperimentKind.TOPIC,
            "topic-cv": ExperimentKind.TOPIC,
            "domain": ExperimentKind.DOMAIN,
            "agreement": ExperimentKind.AGREEMENT,
        }
        return aliases[text.lower()]


class Partition(Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        return cls(text)
