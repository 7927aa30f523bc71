import hashlib
import json
import logging
import os
import subprocess
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable, Iterator, Union

from vivada.errors import ParseError

logger = logging.getLogger(__name__)

type PathLike = Union[str, os.PathLike]


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(data: Union[bytes, str]) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def fingerprint_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def derive_seed(master: int, name: str) -> int:
    """Stable 63-bit seed for the stream called `name` under `master`."""
    digest = hashlib.sha256(f"{master}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & ((1 << 63) - 1)


def read_jsonl(path: PathLike) -> Iterator[tuple[int, dict]]:
    """Yield (line number, object) pairs, skipping blank lines."""
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=lineno, path=str(path)) from e
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", line=lineno, path=str(path))
            yield lineno, obj


def write_jsonl(path: PathLike, records: Iterable[dict]) -> int:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def artifact_version() -> str:
    try:
        version = metadata.version("vivada")
    except metadata.PackageNotFoundError:
        version = "0+unknown"

    root = Path(__file__).resolve().parent.parent
    if (root / ".git").exists():
        try:
            described = subprocess.run(
                ["git", "describe", "--always", "--dirty"],
                cwd=root,
                capture_output=True,
                text=True,
                timeout=5,
                check=True,
            ).stdout.strip()
            if described:
                return f"{version}+{described}"
        except (OSError, subprocess.SubprocessError):
            logger.debug("git describe unavailable", exc_info=True)
    return version
