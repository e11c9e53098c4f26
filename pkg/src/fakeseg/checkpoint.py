"""Versioned binary model checkpoints.

Layout (little-endian):
    magic "TFKM", u32 version=1,
    u32 config length, config JSON (utf-8, sorted keys),
    u32 tensor count, then per tensor sorted by name:
        u16 name length, name utf-8, u8 ndim, u32 dims..., float32 data.

Parameters are stored as float32; a model trained in float32 round-trips
bit-exactly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .transformer import SequenceClassifier, TransformerConfig

CHECKPOINT_MAGIC = b"TFKM"
CHECKPOINT_VERSION = 1


def save_checkpoint(path: str | Path, model: SequenceClassifier) -> None:
    config_blob = json.dumps(model.config.to_dict(), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, len(config_blob)))
        fh.write(config_blob)
        fh.write(struct.pack("<I", len(model.params)))
        for name in sorted(model.params):
            tensor = np.ascontiguousarray(model.params[name], dtype="<f4")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", tensor.ndim))
            fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
            fh.write(tensor.tobytes())


def load_checkpoint(path: str | Path) -> SequenceClassifier:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a model checkpoint (bad magic {magic!r})")
        version, config_len = struct.unpack("<II", fh.read(8))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        config = TransformerConfig.from_dict(json.loads(fh.read(config_len).decode("utf-8")))
        (count,) = struct.unpack("<I", fh.read(4))
        params: dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            size = int(np.prod(shape)) if shape else 1
            data = fh.read(4 * size)
            if len(data) != 4 * size:
                raise ValueError(f"{path}: truncated tensor {name!r}")
            params[name] = np.frombuffer(data, dtype="<f4").reshape(shape).copy()
    return SequenceClassifier(config, params)
