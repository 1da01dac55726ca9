"""Named-tensor checkpoint container.

Binary layout: 8-byte magic, uint32 little-endian header length, UTF-8
JSON header, then the concatenated tensor payload as little-endian
float32.  The header records each tensor's shape and byte offset plus a
sha256 checksum of the whole payload.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"CMTENS01"


class CheckpointError(ValueError):
    pass


def save_tensors(path, tensors: dict[str, np.ndarray], meta: dict | None = None):
    entries = {}
    chunks = []
    offset = 0
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype="<f4")
        raw = arr.tobytes()
        entries[name] = {"shape": list(arr.shape), "offset": offset, "nbytes": len(raw)}
        chunks.append(raw)
        offset += len(raw)
    payload = b"".join(chunks)
    header = {
        "version": 1,
        "tensors": entries,
        "checksum": hashlib.sha256(payload).hexdigest(),
        "meta": meta or {},
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(header_bytes)))
        f.write(header_bytes)
        f.write(payload)


def load_tensors(path) -> tuple[dict[str, np.ndarray], dict]:
    """Returns (tensors, meta).  Raises CheckpointError on a bad magic,
    version, or checksum."""
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a tensor container")
    (header_len,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12 : 12 + header_len].decode("utf-8"))
    if header.get("version") != 1:
        raise CheckpointError(f"{path}: unsupported container version {header.get('version')}")
    payload = raw[12 + header_len :]
    if hashlib.sha256(payload).hexdigest() != header["checksum"]:
        raise CheckpointError(f"{path}: payload checksum mismatch")
    tensors = {}
    for name, entry in header["tensors"].items():
        buf = payload[entry["offset"] : entry["offset"] + entry["nbytes"]]
        tensors[name] = np.frombuffer(buf, dtype="<f4").reshape(entry["shape"]).copy()
    return tensors, header.get("meta", {})
