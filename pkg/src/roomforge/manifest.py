"""Image manifest records and line-delimited JSON IO.

A manifest is one JSON object per line. Required fields are ``id``,
``width`` and ``height``; ``labels`` is a flat map from dotted label key
to value, ``caption`` carries the template fields used for caption
composition, and ``paths`` points at precomputed artifacts (features,
embeddings, detections). Unknown fields are preserved on round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, TextIO


class ManifestError(ValueError):
    """A manifest line that cannot be turned into an ImageRecord."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


@dataclass
class ImageRecord:
    id: str
    width: int
    height: int
    labels: dict[str, Any] = field(default_factory=dict)
    caption: dict[str, Any] = field(default_factory=dict)
    paths: dict[str, str] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "ImageRecord":
        if not isinstance(obj, dict):
            raise ManifestError("record is not an object")
        try:
            rid = obj["id"]
            width = obj["width"]
            height = obj["height"]
        except KeyError as exc:
            raise ManifestError(f"missing field {exc.args[0]!r}") from None
        if not isinstance(rid, str) or not rid:
            raise ManifestError("id must be a non-empty string")
        if not isinstance(width, int) or not isinstance(height, int) or width <= 0 or height <= 0:
            raise ManifestError("width/height must be positive integers")
        known = {"id", "width", "height", "labels", "caption", "paths"}
        return cls(
            id=rid,
            width=width,
            height=height,
            labels=dict(obj.get("labels") or {}),
            caption=dict(obj.get("caption") or {}),
            paths=dict(obj.get("paths") or {}),
            extra={k: v for k, v in obj.items() if k not in known},
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "width": self.width, "height": self.height}
        if self.labels:
            out["labels"] = self.labels
        if self.caption:
            out["caption"] = self.caption
        if self.paths:
            out["paths"] = self.paths
        out.update(self.extra)
        return out


def parse_manifest_line(line: str, line_number: int | None = None) -> ImageRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON ({exc.msg})", line_number) from None
    try:
        return ImageRecord.from_dict(obj)
    except ManifestError as exc:
        raise ManifestError(str(exc), line_number) from None


def iter_manifest(lines: Iterable[str]) -> Iterator[tuple[int, ImageRecord | ManifestError]]:
    """Yield (line_number, record-or-error) for every non-blank line.

    Malformed lines yield the error instead of aborting; callers decide
    whether to skip, count or raise.
    """
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield n, parse_manifest_line(line, n)
        except ManifestError as exc:
            yield n, exc


def read_manifest(path: str) -> list[ImageRecord]:
    """Read a manifest file strictly: any malformed line raises."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for _, item in iter_manifest(fh):
            if isinstance(item, ManifestError):
                raise item
            records.append(item)
    return records


def write_manifest(records: Iterable[ImageRecord], fh: TextIO) -> int:
    n = 0
    for rec in records:
        fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
        n += 1
    return n


def write_jsonl(rows: Iterable[dict[str, Any]], fh: TextIO) -> int:
    n = 0
    for row in rows:
        fh.write(json.dumps(row, sort_keys=True) + "\n")
        n += 1
    return n


def read_jsonl(path: str) -> list[dict[str, Any]]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows
