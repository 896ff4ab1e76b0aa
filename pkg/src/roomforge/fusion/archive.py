"""Checkpoint tensor archive: parsing and canonical serialization.

Byte layout: an unsigned little-endian 64-bit header length N, then N
bytes of JSON mapping tensor name to {"dtype", "shape", "data_offsets"}
plus an optional "__metadata__" string map, then the raw tensor buffer.
Offsets are relative to the buffer start and must tile it exactly (no
holes, no overlap). Supported dtypes are F32 and F16, little-endian.

The writer is canonical: names in lexicographic order, offsets
recomputed densely in that order, minimal JSON whitespace. Two writes of
the same logical archive are byte-identical, and any conforming file
(including non-canonical ones) parses back losslessly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

DTYPE_SIZES = {"F32": 4, "F16": 2}
_NUMPY_DTYPES = {"F32": "<f4", "F16": "<f2"}


class ArchiveError(ValueError):
    pass


@dataclass(frozen=True)
class TensorEntry:
    name: str
    dtype: str
    shape: tuple[int, ...]
    offsets: tuple[int, int]

    @property
    def element_count(self) -> int:
        count = 1
        for dim in self.shape:
            count *= dim
        return count

    @property
    def byte_length(self) -> int:
        return self.element_count * DTYPE_SIZES[self.dtype]


@dataclass
class TensorArchive:
    entries: dict[str, TensorEntry]      # sorted by name
    buffer: bytes
    metadata: dict[str, str] = field(default_factory=dict)

    def names(self) -> list[str]:
        return list(self.entries)

    def tensor(self, name: str) -> np.ndarray:
        entry = self.entries[name]
        begin, end = entry.offsets
        arr = np.frombuffer(self.buffer[begin:end], dtype=_NUMPY_DTYPES[entry.dtype])
        return arr.reshape(entry.shape)

    @classmethod
    def from_arrays(
        cls, arrays: Mapping[str, np.ndarray], metadata: Mapping[str, str] | None = None
    ) -> "TensorArchive":
        entries: dict[str, TensorEntry] = {}
        parts: list[bytes] = []
        cursor = 0
        for name in sorted(arrays):
            arr = np.asarray(arrays[name])
            if arr.dtype == np.float16:
                dtype = "F16"
                raw = np.ascontiguousarray(arr, dtype="<f2").tobytes()
            else:
                dtype = "F32"
                raw = np.ascontiguousarray(arr, dtype="<f4").tobytes()
            entries[name] = TensorEntry(
                name=name,
                dtype=dtype,
                shape=tuple(int(d) for d in arr.shape),
                offsets=(cursor, cursor + len(raw)),
            )
            parts.append(raw)
            cursor += len(raw)
        return cls(entries=entries, buffer=b"".join(parts), metadata=dict(metadata or {}))


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ArchiveError(f"duplicate header key {key!r}")
        seen[key] = value
    return seen


def read_tensor_archive(data: bytes) -> TensorArchive:
    """Parse archive bytes, validating layout invariants."""
    if len(data) < 8:
        raise ArchiveError(f"stream of {len(data)} bytes is shorter than the length prefix")
    (header_len,) = struct.unpack_from("<Q", data)
    if 8 + header_len > len(data):
        raise ArchiveError(
            f"header length {header_len} exceeds stream ({len(data) - 8} bytes after prefix)"
        )
    try:
        header = json.loads(data[8 : 8 + header_len].decode("utf-8"), object_pairs_hook=_reject_duplicate_keys)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArchiveError(f"malformed header: {exc}") from None
    if not isinstance(header, dict):
        raise ArchiveError("header must be a JSON object")

    buffer = data[8 + header_len :]
    metadata: dict[str, str] = {}
    entries: dict[str, TensorEntry] = {}
    for name, value in header.items():
        if name == "__metadata__":
            if not isinstance(value, dict) or any(
                not isinstance(k, str) or not isinstance(v, str) for k, v in value.items()
            ):
                raise ArchiveError("__metadata__ must map strings to strings")
            metadata = dict(value)
            continue
        try:
            dtype = value["dtype"]
            shape = tuple(int(d) for d in value["shape"])
            begin, end = value["data_offsets"]
        except (TypeError, KeyError, ValueError) as exc:
            raise ArchiveError(f"entry {name!r}: malformed ({exc})") from None
        if dtype not in DTYPE_SIZES:
            raise ArchiveError(f"entry {name!r}: unsupported dtype {dtype!r}")
        if any(d < 0 for d in shape):
            raise ArchiveError(f"entry {name!r}: negative dimension in {shape}")
        entry = TensorEntry(name=name, dtype=dtype, shape=shape, offsets=(begin, end))
        if begin < 0 or end < begin or end > len(buffer):
            raise ArchiveError(f"entry {name!r}: offsets {begin, end} out of bounds")
        if end - begin != entry.byte_length:
            raise ArchiveError(
                f"entry {name!r}: range of {end - begin} bytes != {entry.byte_length} expected"
            )
        entries[name] = entry

    spans = sorted((e.offsets for e in entries.values()))
    cursor = 0
    for begin, end in spans:
        if begin != cursor:
            kind = "overlapping" if begin < cursor else "non-contiguous"
            raise ArchiveError(f"{kind} data ranges at offset {begin}")
        cursor = end
    if cursor != len(buffer):
        raise ArchiveError(f"buffer has {len(buffer) - cursor} trailing bytes not covered by any tensor")

    return TensorArchive(
        entries={name: entries[name] for name in sorted(entries)},
        buffer=buffer,
        metadata=metadata,
    )


def write_tensor_archive(archive: TensorArchive) -> bytes:
    """Serialize canonically; read_tensor_archive inverts this exactly."""
    header: dict[str, object] = {}
    if archive.metadata:
        header["__metadata__"] = {k: archive.metadata[k] for k in sorted(archive.metadata)}
    parts: list[bytes] = []
    cursor = 0
    for name in sorted(archive.entries):
        entry = archive.entries[name]
        begin, end = entry.offsets
        raw = archive.buffer[begin:end]
        header[name] = {
            "dtype": entry.dtype,
            "shape": list(entry.shape),
            "data_offsets": [cursor, cursor + len(raw)],
        }
        parts.append(raw)
        cursor += len(raw)
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return struct.pack("<Q", len(header_bytes)) + header_bytes + b"".join(parts)


def read_archive_file(path: str) -> TensorArchive:
    with open(path, "rb") as fh:
        return read_tensor_archive(fh.read())


def write_archive_file(archive: TensorArchive, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(write_tensor_archive(archive))
