"""Caption template assembly: room, style, quality labels, furniture, text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class CaptionParts:
    room: str = ""
    style: str = ""
    quality_labels: tuple[str, ...] = ()
    furniture: tuple[str, ...] = ()
    natural_text: str = ""

    @classmethod
    def from_record_caption(cls, caption: dict[str, Any]) -> "CaptionParts":
        return cls(
            room=caption.get("room", "") or "",
            style=caption.get("style", "") or "",
            quality_labels=tuple(caption.get("quality", ()) or ()),
            furniture=tuple(caption.get("furniture", ()) or ()),
            natural_text=caption.get("text", "") or "",
        )


def compose_caption(parts: CaptionParts) -> str:
    """Join the template fields with ", ", omitting empty components."""
    fields: list[str] = []
    for value in (parts.room, parts.style, *parts.quality_labels, *parts.furniture, parts.natural_text):
        value = value.strip()
        if value:
            fields.append(value)
    return ", ".join(fields)
