"""The CTRV parameter container.

Layout: magic b"CTRV", format version (u32 LE), header length (u32 LE),
UTF-8 JSON header, then each parameter's float32 LE values in header order.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from vivada.constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from vivada.errors import FormatError
from vivada.tensor.graph import Params
from vivada.util import PathLike

_U32 = struct.Struct("<I")


@dataclass
class Checkpoint:
    kind: str
    hyperparameters: dict[str, Any]
    vocabulary_hash: str
    params: Params
    # vocabulary tokens, count tables, thresholds ...
    extra: dict[str, Any] = field(default_factory=dict)

    def header(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "hyperparameters": self.hyperparameters,
            "vocabulary_hash": self.vocabulary_hash,
            "parameters": [{"name": name, "shape": list(p.shape)} for name, p in self.params.items()],
            "extra": self.extra,
        }


def write_checkpoint(path: PathLike, checkpoint: Checkpoint):
    header = json.dumps(checkpoint.header(), sort_keys=True, ensure_ascii=False).encode("utf-8")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(_U32.pack(CHECKPOINT_VERSION))
        f.write(_U32.pack(len(header)))
        f.write(header)
        for p in checkpoint.params.values():
            f.write(np.ascontiguousarray(p, dtype="<f4").tobytes())


def read_checkpoint(path: PathLike) -> Checkpoint:
    data = Path(path).read_bytes()
    if data[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"{path}: not a CTRV checkpoint", offset=0)
    if len(data) < 12:
        raise FormatError(f"{path}: truncated preamble", offset=len(data))
    (version,) = _U32.unpack_from(data, 4)
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}", offset=4)
    (length,) = _U32.unpack_from(data, 8)
    offset = 12
    if offset + length > len(data):
        raise FormatError(f"{path}: header runs past end of file", offset=offset)
    try:
        header = json.loads(data[offset : offset + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"{path}: unreadable header ({e})", offset=offset) from e
    offset += length

    params: Params = {}
    for entry in header.get("parameters", []):
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        end = offset + 4 * count
        if end > len(data):
            raise FormatError(f"{path}: parameter {entry['name']} truncated", offset=offset)
        params[entry["name"]] = (
            np.frombuffer(data, dtype="<f4", count=count, offset=offset).astype(np.float32).reshape(shape)
        )
        offset = end
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes", offset=offset)

    return Checkpoint(
        kind=header["kind"],
        hyperparameters=header.get("hyperparameters", {}),
        vocabulary_hash=header.get("vocabulary_hash", ""),
        params=params,
        extra=header.get("extra", {}),
    )
