"""Append-only event log with checksummed entries and full replay.

One JSON object per line: {"seq", "kind", "payload", "checksum"} where
checksum is the SHA-256 hex digest of the canonical JSON encoding
(sorted keys, compact separators) of [seq, kind, payload]. Sequence
numbers start at 1 and increase by 1. Appends are flushed before the
caller is acknowledged; replaying the file reconstructs state exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from typing import Any, Callable, Iterator


class EventLogError(ValueError):
    pass


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    payload: dict[str, Any]


def _checksum(seq: int, kind: str, payload: dict[str, Any]) -> str:
    canonical = json.dumps([seq, kind, payload], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def encode_event(event: Event) -> str:
    return json.dumps(
        {
            "seq": event.seq,
            "kind": event.kind,
            "payload": event.payload,
            "checksum": _checksum(event.seq, event.kind, event.payload),
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def decode_event(line: str, expected_seq: int | None = None) -> Event:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventLogError(f"corrupt event line: {exc}") from None
    try:
        event = Event(seq=obj["seq"], kind=obj["kind"], payload=obj["payload"])
        stored = obj["checksum"]
    except (KeyError, TypeError) as exc:
        raise EventLogError(f"event missing field: {exc}") from None
    if stored != _checksum(event.seq, event.kind, event.payload):
        raise EventLogError(f"checksum mismatch at seq {event.seq}")
    if expected_seq is not None and event.seq != expected_seq:
        raise EventLogError(f"expected seq {expected_seq}, found {event.seq}")
    return event


class EventLog:
    """File-backed log; pass path=None for an in-memory log."""

    def __init__(self, path: str | None):
        self.path = path
        self._seq = 0
        self._memory: list[str] = []
        if path and os.path.exists(path):
            for _ in self.replay():
                pass

    @property
    def last_seq(self) -> int:
        return self._seq

    def append(self, kind: str, payload: dict[str, Any]) -> Event:
        event = Event(seq=self._seq + 1, kind=kind, payload=payload)
        line = encode_event(event)
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        else:
            self._memory.append(line)
        self._seq = event.seq
        return event

    def replay(self) -> Iterator[Event]:
        """Yield all events in order, validating seqs and checksums."""
        if self.path:
            if not os.path.exists(self.path):
                self._seq = 0
                return
            with open(self.path, "r", encoding="utf-8") as fh:
                lines = [line for line in fh if line.strip()]
        else:
            lines = list(self._memory)
        seq = 0
        for line in lines:
            seq += 1
            yield decode_event(line, expected_seq=seq)
        self._seq = seq

    def replay_into(self, apply: Callable[[Event], None]) -> int:
        count = 0
        for event in self.replay():
            apply(event)
            count += 1
        return count
