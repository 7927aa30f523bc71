"""Word-vector tables and the w2v file formats.

Binary: ASCII header "<count> <dim>\\n", then per word its bytes, one space,
`dim` float32 LE values and an optional newline. Text: one word followed
by `dim` decimal values per line, with an optional "<count> <dim>" header.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from vivada import constants as C
from vivada.errors import FormatError, UsageError
from vivada.text.vocabulary import RESERVED, Vocabulary
from vivada.util import PathLike

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingTable:
    vocabulary: Vocabulary
    matrix: np.ndarray
    trainable: bool = True
    coverage: float = 0.0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float32)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.vocabulary):
            raise ValueError(
                f"embedding matrix {self.matrix.shape} does not fit a vocabulary of {len(self.vocabulary)}"
            )
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("embedding matrix has non-finite entries")
        self.matrix[C.PAD_INDEX] = 0.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def row(self, token: str) -> np.ndarray:
        return self.matrix[self.vocabulary.lookup(token)]

    @classmethod
    def random(
        cls,
        vocab: Vocabulary,
        dim: int,
        rng: np.random.Generator,
        limit: float = C.MISSING_EMBEDDING_RANGE,
    ) -> "EmbeddingTable":
        matrix = rng.uniform(-limit, limit, size=(len(vocab), dim)).astype(np.float32)
        return cls(vocabulary=vocab, matrix=matrix)


# -- reading ------------------------------------------------------------------


def _parse_header(line: bytes, offset: int) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise FormatError(f"malformed embedding header {line[:40]!r}", offset=offset)
    return int(parts[0]), int(parts[1])


def _read_binary(data: bytes, dim: int) -> dict[str, tuple[np.ndarray, int]]:
    newline = data.find(b"\n")
    if newline < 0:
        raise FormatError("embedding header is not newline-terminated", offset=0)
    count, file_dim = _parse_header(data[:newline], 0)
    if file_dim != dim:
        raise FormatError(f"embedding dimension {file_dim} does not match expected {dim}", offset=0)

    vectors: dict[str, tuple[np.ndarray, int]] = {}
    width = 4 * dim
    pos = newline + 1
    for _ in range(count):
        while pos < len(data) and data[pos] == 0x0A:
            pos += 1
        space = data.find(b" ", pos)
        if space < 0:
            raise FormatError("word is not space-terminated", offset=pos)
        try:
            word = data[pos:space].decode("utf-8")
        except UnicodeDecodeError as e:
            raise FormatError(f"word is not valid UTF-8: {data[pos:space][:40]!r}", offset=pos) from e
        start = space + 1
        if start + width > len(data):
            raise FormatError(f"vector for {word!r} truncated", offset=start)
        vector = np.frombuffer(data, dtype="<f4", count=dim, offset=start).astype(np.float32)
        vectors.setdefault(word, (vector, pos))
        pos = start + width
    return vectors


def _read_text(data: bytes, dim: int) -> dict[str, tuple[np.ndarray, int]]:
    vectors: dict[str, tuple[np.ndarray, int]] = {}
    offset = 0
    for lineno, raw in enumerate(data.splitlines(keepends=True)):
        here = offset
        offset += len(raw)
        try:
            line = raw.decode("utf-8").rstrip()
        except UnicodeDecodeError as e:
            raise FormatError(f"line is not valid UTF-8: {raw[:40]!r}", offset=here) from e
        if not line:
            continue
        parts = line.split(" ")
        if lineno == 0 and len(parts) == 2 and all(p.isdigit() for p in parts):
            if int(parts[1]) != dim:
                raise FormatError(f"embedding dimension {parts[1]} does not match expected {dim}", offset=0)
            continue
        if len(parts) != dim + 1:
            raise FormatError(f"expected {dim} values for {parts[0]!r}, got {len(parts) - 1}", offset=here)
        try:
            vector = np.array([float(v) for v in parts[1:]], dtype=np.float32)
        except ValueError as e:
            raise FormatError(f"unreadable value for {parts[0]!r}: {e}", offset=here) from e
        vectors.setdefault(parts[0], (vector, here))
    return vectors


def load_embeddings(
    path: PathLike,
    vocab: Vocabulary,
    dim: int = C.EMBEDDING_DIM,
    rng: Optional[np.random.Generator] = None,
    binary: Optional[bool] = None,
    extend_to: Optional[int] = None,
) -> EmbeddingTable:
    """Pretrained rows for known words, uniform [-0.25, 0.25] for the rest (OOV included).

    With `extend_to`, words from the file that `vocab` lacks are appended
    until the vocabulary holds `extend_to` entries.
    """
    if binary is None:
        binary = Path(path).suffix == ".bin"
    data = Path(path).read_bytes()
    vectors = _read_binary(data, dim) if binary else _read_text(data, dim)
    if extend_to is not None:
        size = len(vocab)
        vocab = vocab.extended(vectors, extend_to)
        logger.info("embeddings: %d pretrained words added to the vocabulary", len(vocab) - size)

    table = EmbeddingTable.random(vocab, dim, rng if rng is not None else np.random.default_rng(0))
    found = 0
    for word in vocab.words():
        if word in vectors:
            vector, _ = vectors[word]
            if not np.all(np.isfinite(vector)):
                raise FormatError(f"non-finite vector for {word!r}", offset=vectors[word][1])
            table.matrix[vocab.index[word]] = vector
            found += 1

    words = len(vocab) - len(RESERVED)
    table.coverage = found / words if words else 0.0
    logger.info("embeddings: %d/%d vocabulary words covered from %s", found, words, path)
    return table


# -- writing ------------------------------------------------------------------


def write_embeddings(path: PathLike, table: EmbeddingTable, binary: Optional[bool] = None):
    """Non-reserved rows in vocabulary order, one trailing newline per vector."""
    if binary is None:
        binary = Path(path).suffix == ".bin"
    words = table.vocabulary.words()
    if not words:
        raise UsageError("nothing to write: vocabulary has no words")

    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(f"{len(words)} {table.dim}\n".encode("ascii"))
        for word in words:
            vector = table.matrix[table.vocabulary.index[word]]
            if binary:
                f.write(word.encode("utf-8") + b" ")
                f.write(np.ascontiguousarray(vector, dtype="<f4").tobytes())
                f.write(b"\n")
            else:
                values = " ".join(repr(float(v)) for v in vector)
                f.write(f"{word} {values}\n".encode("utf-8"))
