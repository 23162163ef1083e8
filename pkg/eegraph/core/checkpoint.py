"""Flat binary parameter checkpoints.

Layout (little-endian):
    b"EGNN" | version u32 | count u32
    per tensor: name_len u32 | name utf-8 | rank u32 | extents u64 * rank | values f64 * prod(extents)
"""
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Union

import numpy as np

from ..utils.error_handler import CheckpointError, UnsupportedVersionError

MAGIC = b"EGNN"
VERSION = 1


def save_checkpoint(path: Union[str, Path], tensors: Dict[str, np.ndarray]) -> str:
    """Write named arrays to ``path``; returns the path written."""
    chunks = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name, value in tensors.items():
        value = np.asarray(value, dtype="<f8")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", value.ndim))
        chunks.append(struct.pack(f"<{value.ndim}Q", *value.shape))
        chunks.append(np.ascontiguousarray(value).tobytes())
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    return str(path)


def load_checkpoint(path: Union[str, Path]) -> "OrderedDict[str, np.ndarray]":
    """Read a checkpoint written by ``save_checkpoint``."""
    blob = Path(path).read_bytes()
    reader = _Reader(blob, str(path))
    if reader.take(4) != MAGIC:
        raise CheckpointError(f"{path}: bad magic, not an eegraph checkpoint")
    version, count = reader.unpack("<II")
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: checkpoint version {version} (supported: {VERSION})")

    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for _ in range(count):
        (name_len,) = reader.unpack("<I")
        name = reader.take(name_len).decode("utf-8")
        (rank,) = reader.unpack("<I")
        shape = reader.unpack(f"<{rank}Q") if rank else ()
        n_values = int(np.prod(shape)) if rank else 1
        values = np.frombuffer(reader.take(8 * n_values), dtype="<f8")
        tensors[name] = values.astype(np.float64).reshape(shape)
    if reader.offset != len(blob):
        raise CheckpointError(f"{path}: {len(blob) - reader.offset} trailing bytes")
    return tensors


class _Reader:
    def __init__(self, blob: bytes, label: str):
        self.blob, self.label, self.offset = blob, label, 0

    def take(self, n: int) -> bytes:
        if self.offset + n > len(self.blob):
            raise CheckpointError(
                f"{self.label}: truncated, needed {self.offset + n} bytes, file has {len(self.blob)}"
            )
        chunk = self.blob[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))
