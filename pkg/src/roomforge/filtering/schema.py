"""Label schema: the vocabulary of per-image quality labels.

A schema groups secondary labels under primary groups. Each secondary
label declares a value kind (``bool``, ``number`` or ``category``) plus
an optional numeric range or category enumeration. Label keys are dotted
``group.label`` paths, e.g. ``low_quality.watermark``.

The default schema shipped with the package defines 5 primary groups and
19 secondary labels; it is a data file and can be replaced wholesale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any


class SchemaError(ValueError):
    pass


class UnknownLabelError(SchemaError):
    def __init__(self, key: str):
        super().__init__(f"unknown label key {key!r}")
        self.key = key


class LabelValueError(SchemaError):
    pass


@dataclass(frozen=True)
class LabelDef:
    key: str                       # dotted group.label path
    kind: str                      # bool | number | category
    minimum: float | None = None
    maximum: float | None = None
    values: tuple[str, ...] = ()   # category enumeration

    def validate(self, value: Any) -> None:
        if self.kind == "bool":
            if not isinstance(value, bool):
                raise LabelValueError(f"{self.key}: expected bool, got {value!r}")
        elif self.kind == "number":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise LabelValueError(f"{self.key}: expected number, got {value!r}")
            if value != value or value in (float("inf"), float("-inf")):
                raise LabelValueError(f"{self.key}: value must be finite")
            if self.minimum is not None and value < self.minimum:
                raise LabelValueError(f"{self.key}: {value} below minimum {self.minimum}")
            if self.maximum is not None and value > self.maximum:
                raise LabelValueError(f"{self.key}: {value} above maximum {self.maximum}")
        elif self.kind == "category":
            if not isinstance(value, str):
                raise LabelValueError(f"{self.key}: expected category string, got {value!r}")
            if value not in self.values:
                raise LabelValueError(f"{self.key}: {value!r} not in {sorted(self.values)}")
        else:
            raise SchemaError(f"{self.key}: unknown kind {self.kind!r}")


@dataclass
class LabelSchema:
    groups: dict[str, str]          # group key -> display name
    labels: dict[str, LabelDef] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.labels:
            group = key.split(".", 1)[0]
            if group not in self.groups:
                raise SchemaError(f"label {key!r} references undeclared group {group!r}")

    def label(self, key: str) -> LabelDef:
        try:
            return self.labels[key]
        except KeyError:
            raise UnknownLabelError(key) from None

    def __contains__(self, key: str) -> bool:
        return key in self.labels

    def validate_labels(self, values: dict[str, Any]) -> None:
        """Check a QualityLabelSet: every key known, every value in range."""
        for key, value in values.items():
            self.label(key).validate(value)


def schema_from_dict(obj: dict[str, Any]) -> LabelSchema:
    groups: dict[str, str] = {}
    labels: dict[str, LabelDef] = {}
    for group in obj["groups"]:
        gkey = group["key"]
        if gkey in groups:
            raise SchemaError(f"duplicate group {gkey!r}")
        groups[gkey] = group.get("name", gkey)
        for lab in group["labels"]:
            key = f"{gkey}.{lab['key']}"
            if key in labels:
                raise SchemaError(f"duplicate label {key!r}")
            labels[key] = LabelDef(
                key=key,
                kind=lab["kind"],
                minimum=lab.get("min"),
                maximum=lab.get("max"),
                values=tuple(lab.get("values", ())),
            )
    return LabelSchema(groups=groups, labels=labels)


def load_schema(path: str) -> LabelSchema:
    with open(path, "r", encoding="utf-8") as fh:
        return schema_from_dict(json.load(fh))


def default_schema() -> LabelSchema:
    text = resources.files("roomforge.filtering").joinpath("data/default_schema.json").read_text("utf-8")
    return schema_from_dict(json.loads(text))
