"""Binary checkpoint format.

Layout: 8-byte magic, uint32 version, uint64 header length, UTF-8 JSON
header, then raw little-endian tensor bytes. The header lists tensors in
name order with dtype, shape and offset into the payload. Round-trips are
bit-exact; loads validate magic, version and payload size.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import CheckpointError
from ..util import atomic_write_bytes
from .config import ModelConfig

MAGIC = b"MEDVLMCK"
VERSION = 1

_DTYPES = {"float32": "<f4", "float64": "<f8", "int64": "<i8", "int32": "<i4"}


def save_checkpoint(path: str | Path, params: dict[str, np.ndarray],
                    config: ModelConfig, meta: dict | None = None) -> None:
    names = sorted(params)
    tensors = []
    chunks = []
    offset = 0
    for name in names:
        arr = params[name]
        dtype = str(arr.dtype)
        if dtype not in _DTYPES:
            raise CheckpointError(f"unsupported dtype {dtype} for tensor {name}")
        raw = np.ascontiguousarray(arr).astype(_DTYPES[dtype]).tobytes()
        tensors.append({"name": name, "dtype": dtype, "shape": list(arr.shape),
                        "offset": offset, "nbytes": len(raw)})
        chunks.append(raw)
        offset += len(raw)
    header = json.dumps({"config": config.to_dict(), "meta": meta or {},
                         "tensors": tensors},
                        sort_keys=True, separators=(",", ":")).encode("utf-8")
    blob = b"".join([MAGIC, struct.pack("<I", VERSION),
                     struct.pack("<Q", len(header)), header, *chunks])
    atomic_write_bytes(path, blob)


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], ModelConfig, dict]:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    if len(data) < 20 or data[:8] != MAGIC:
        raise CheckpointError(f"not a model checkpoint: {path}")
    (version,) = struct.unpack("<I", data[8:12])
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    (hlen,) = struct.unpack("<Q", data[12:20])
    if len(data) < 20 + hlen:
        raise CheckpointError(f"truncated checkpoint header: {path}")
    try:
        header = json.loads(data[20:20 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt checkpoint header: {e}") from e
    payload = data[20 + hlen:]
    params: dict[str, np.ndarray] = {}
    for t in header["tensors"]:
        end = t["offset"] + t["nbytes"]
        if end > len(payload):
            raise CheckpointError(f"tensor {t['name']} extends past payload end")
        arr = np.frombuffer(payload[t["offset"]:end], dtype=_DTYPES[t["dtype"]])
        params[t["name"]] = arr.reshape(t["shape"]).astype(t["dtype"])
    config = ModelConfig.from_dict(header["config"])
    return params, config, header.get("meta", {})
