import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Optional, Self

from vivada import constants as C
from vivada.errors import UsageError
from vivada.util import PathLike, canonical_json, sha256_hex


class _Config:
    """Mixin: dict/JSON loading with unknown-key rejection."""

    @classmethod
    def from_dict(cls, data: Optional[dict[str, Any]] = None) -> Self:
        data = dict(data or {})
        known = {f.name: f for f in fields(cls)}  # type: ignore[arg-type]
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise UsageError(f"unknown {cls.__name__} keys: {', '.join(unknown)}")
        for name, value in list(data.items()):
            if isinstance(value, list) and isinstance(known[name].default, tuple):
                data[name] = tuple(value)
            elif isinstance(value, list) and isinstance(known[name].default, frozenset):
                data[name] = frozenset(value)
        try:
            return cls(**data)
        except (TypeError, ValueError) as e:
            raise UsageError(f"invalid {cls.__name__}: {e}") from e

    @classmethod
    def from_file(cls, path: Optional[PathLike]) -> Self:
        if path is None:
            return cls.from_dict({})
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise UsageError(f"{path}: invalid JSON config: {e.msg}") from e
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)  # type: ignore[call-overload]
        for key, value in out.items():
            if isinstance(value, (tuple, frozenset)):
                out[key] = sorted(value) if isinstance(value, frozenset) else list(value)
        return out

    def config_hash(self) -> str:
        return sha256_hex(canonical_json(self.to_dict()))


@dataclass(frozen=True)
class CrawlPolicy(_Config):
    max_hops: int = C.MAX_HOPS
    link_classes: frozenset = frozenset(C.LINK_CLASSES)
    host_delay: float = C.HOST_DELAY
    max_pages: int = C.MAX_PAGES
    timeout: float = C.FETCH_TIMEOUT
    retries: int = C.FETCH_RETRIES
    workers: int = 1
    respect_robots: bool = True
    user_agent: str = C.USER_AGENT
    wiki_host_suffix: str = C.WIKI_HOST_SUFFIX
    random_article_url: str = C.DEFAULT_WIKI_BASE + C.RANDOM_ARTICLE_PATH
    # attempts per requested negative before giving up
    negative_attempts: int = 10

    def __post_init__(self):
        if self.max_hops < 0:
            raise ValueError("max_hops must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        unknown = set(self.link_classes) - set(C.LINK_CLASSES)
        if unknown:
            raise ValueError(f"unsupported link classes: {sorted(unknown)}")


@dataclass(frozen=True)
class EncodingLimits(_Config):
    max_sentences: int = C.MAX_SENTENCES
    max_words: int = C.MAX_WORDS_PER_SENTENCE
    max_tokens: int = C.MAX_TOKENS

    def __post_init__(self):
        if min(self.max_sentences, self.max_words, self.max_tokens) <= 0:
            raise ValueError("encoding limits must be positive")


@dataclass(frozen=True)
class VocabularyConfig(_Config):
    max_size: int = C.VOCAB_MAX_SIZE
    min_freq: int = C.VOCAB_MIN_FREQ
    # pretrained words unseen in training join the vocabulary, in file order
    include_pretrained: bool = False


@dataclass(frozen=True)
class CnnConfig(_Config):
    windows: tuple = C.CNN_WINDOWS
    filters: int = C.CNN_FILTERS
    embedding_dim: int = C.EMBEDDING_DIM
    dropout: float = C.DROPOUT


@dataclass(frozen=True)
class HanConfig(_Config):
    hidden: int = C.GRU_HIDDEN
    embedding_dim: int = C.EMBEDDING_DIM
    dropout: float = C.DROPOUT

    @property
    def attention(self) -> int:
        return 2 * self.hidden


@dataclass(frozen=True)
class TfIdfConfig(_Config):
    l2: float = C.TFIDF_LAMBDA
    iterations: int = C.TFIDF_ITERATIONS
    step: float = C.TFIDF_STEP


@dataclass(frozen=True)
class LmConfig(_Config):
    mu: float = C.DIRICHLET_MU
    lexicon: Optional[str] = None


@dataclass(frozen=True)
class TrainConfig(_Config):
    epochs: int = C.EPOCHS
    batch_size: int = C.BATCH_SIZE
    learning_rate: float = C.LEARNING_RATE
    beta1: float = C.ADAM_BETA1
    beta2: float = C.ADAM_BETA2
    epsilon: float = C.ADAM_EPSILON
    l2: float = C.L2_LAMBDA
    patience: int = C.PATIENCE
    clip_norm: Optional[float] = None
    calibrate: bool = False
    seed: int = 0
    progress: bool = False

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1 or self.patience < 0:
            raise ValueError("epochs, batch_size and patience must be sensible")


@dataclass(frozen=True)
class AnnotationScale(_Config):
    values: tuple = C.ANNOTATION_SCALE
    midpoint: float = C.ANNOTATION_MIDPOINT
    min_annotations: int = C.MIN_ANNOTATIONS

    def on_scale(self, score: float) -> bool:
        return min(self.values) <= score <= max(self.values)


@dataclass(frozen=True)
class BootstrapConfig(_Config):
    resamples: int = C.BOOTSTRAP_RESAMPLES
    level: float = C.CONFIDENCE_LEVEL
    workers: int = 1


@dataclass(frozen=True)
class ModelSettings(_Config):
    """Everything needed to build and train one classifier kind."""

    vocabulary: dict = field(default_factory=dict)
    limits: dict = field(default_factory=dict)
    cnn: dict = field(default_factory=dict)
    han: dict = field(default_factory=dict)
    tfidf: dict = field(default_factory=dict)
    lm: dict = field(default_factory=dict)
    train: dict = field(default_factory=dict)
    embeddings: Optional[str] = None

    def vocabulary_config(self) -> VocabularyConfig:
        return VocabularyConfig.from_dict(self.vocabulary)

    def encoding_limits(self) -> EncodingLimits:
        return EncodingLimits.from_dict(self.limits)

    def cnn_config(self) -> CnnConfig:
        return CnnConfig.from_dict(self.cnn)

    def han_config(self) -> HanConfig:
        return HanConfig.from_dict(self.han)

    def tfidf_config(self) -> TfIdfConfig:
        return TfIdfConfig.from_dict(self.tfidf)

    def lm_config(self) -> LmConfig:
        return LmConfig.from_dict(self.lm)

    def train_config(self, seed: Optional[int] = None) -> TrainConfig:
        data = dict(self.train)
        if seed is not None:
            data["seed"] = seed
        return TrainConfig.from_dict(data)
