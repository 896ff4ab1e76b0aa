"""Feature matrix container and its binary file format.

Layout of a ``.rfmx`` file: a 16-byte header (magic ``RFMX``, u32
little-endian row count n, u32 little-endian dimension d, u32 reserved
zero) followed by n*d little-endian 32-bit floats in row-major order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"RFMX"
HEADER = struct.Struct("<4sIII")


class FeatureFileError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureSet:
    data: np.ndarray    # (n, d) float64, validated finite

    def __post_init__(self):
        arr = self.data
        if arr.ndim != 2:
            raise FeatureFileError(f"feature matrix must be 2-D, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise FeatureFileError("feature matrix contains non-finite entries")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "FeatureSet":
        return cls(np.asarray(arr, dtype=np.float64))


def write_features(features: FeatureSet, path: str) -> None:
    arr = np.ascontiguousarray(features.data, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, features.n, features.d, 0))
        fh.write(arr.tobytes())


def read_features(path: str) -> FeatureSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER.size:
        raise FeatureFileError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, n, d, _reserved = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    expected = HEADER.size + 4 * n * d
    if len(raw) != expected:
        raise FeatureFileError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(n, d)
    return FeatureSet(data.astype(np.float64))
