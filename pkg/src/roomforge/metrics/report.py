"""Seven-metric report assembly and serialization.

Report files are JSON mapping metric name to {value, count, direction}.
Directions encode which way is better: AS, SFR, SA, HFR and CS improve
upward; FID and FRR improve downward (repetition is a defect rate, so
lower repetition is better even though historical result tables have
printed its arrow inconsistently).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping, Sequence

import numpy as np

from .features import FeatureSet
from .fid import fid_from_features
from .rates import (
    DetectionRecord,
    MetricInputError,
    PromptExpectation,
    aesthetic_score,
    clip_score,
    follow_rate,
    repetition_rate,
    style_accuracy,
)

METRIC_NAMES = ("AS", "SFR", "SA", "HFR", "FRR", "FID", "CS")

DIRECTIONS: dict[str, str] = {
    "AS": "up",
    "SFR": "up",
    "SA": "up",
    "HFR": "up",
    "FRR": "down",
    "FID": "down",
    "CS": "up",
}


@dataclass(frozen=True)
class MetricVocabulary:
    furniture: frozenset[str]
    styles: frozenset[str]
    hard_elements: frozenset[str]
    singleton_rules: Mapping[str, frozenset[str]]

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "MetricVocabulary":
        return cls(
            furniture=frozenset(obj["furniture"]),
            styles=frozenset(obj["styles"]),
            hard_elements=frozenset(obj["hard_elements"]),
            singleton_rules={
                room: frozenset(classes) for room, classes in obj["singleton_rules"].items()
            },
        )


def default_metric_vocabulary() -> MetricVocabulary:
    text = resources.files("roomforge.metrics").joinpath("data/metric_vocab.json").read_text("utf-8")
    return MetricVocabulary.from_dict(json.loads(text))


def load_metric_vocabulary(path: str) -> MetricVocabulary:
    with open(path, "r", encoding="utf-8") as fh:
        return MetricVocabulary.from_dict(json.load(fh))


@dataclass
class MetricInputs:
    features_real: FeatureSet | None = None
    features_generated: FeatureSet | None = None
    image_embeddings: np.ndarray | None = None
    text_embeddings: np.ndarray | None = None
    aesthetic_scores: Sequence[float] | None = None
    expectations: Sequence[PromptExpectation] = field(default_factory=list)
    detections: Sequence[DetectionRecord] = field(default_factory=list)
    vocabulary: MetricVocabulary | None = None

    def missing(self) -> list[str]:
        out = []
        if self.features_real is None or self.features_generated is None:
            out.append("FID: real and generated feature sets")
        if self.image_embeddings is None or self.text_embeddings is None:
            out.append("CS: image and text embeddings")
        if not self.aesthetic_scores:
            out.append("AS: per-image aesthetic scores")
        if not self.expectations or not self.detections:
            out.append("SFR/SA/HFR/FRR: expectations and detections")
        if self.vocabulary is None:
            out.append("SFR/SA/HFR/FRR: metric vocabulary")
        return out


@dataclass(frozen=True)
class MetricReport:
    values: Mapping[str, float]
    counts: Mapping[str, int]
    directions: Mapping[str, str] = field(default_factory=lambda: dict(DIRECTIONS))

    def __post_init__(self):
        missing = [m for m in METRIC_NAMES if m not in self.values]
        if missing:
            raise MetricInputError(f"report is missing metrics: {missing}")

    def to_dict(self) -> dict[str, Any]:
        return {
            name: {
                "value": self.values[name],
                "count": self.counts.get(name, 0),
                "direction": self.directions.get(name, DIRECTIONS[name]),
            }
            for name in METRIC_NAMES
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "MetricReport":
        values = {}
        counts = {}
        directions = {}
        for name, entry in obj.items():
            values[name] = float(entry["value"])
            counts[name] = int(entry.get("count", 0))
            directions[name] = entry.get("direction", DIRECTIONS.get(name, "up"))
        return cls(values=values, counts=counts, directions=directions)

    @classmethod
    def from_json(cls, text: str) -> "MetricReport":
        return cls.from_dict(json.loads(text))


def metric_report(inputs: MetricInputs) -> MetricReport:
    """Compute all seven metrics from a complete input bundle."""
    missing = inputs.missing()
    if missing:
        raise MetricInputError("missing inputs: " + "; ".join(missing))
    assert inputs.vocabulary is not None
    vocab = inputs.vocabulary

    values = {
        "AS": aesthetic_score(inputs.aesthetic_scores),
        "SFR": follow_rate(inputs.expectations, inputs.detections, vocab.furniture, "furniture"),
        "SA": style_accuracy(inputs.expectations, inputs.detections, vocab.styles),
        "HFR": follow_rate(inputs.expectations, inputs.detections, vocab.hard_elements, "hard_elements"),
        "FRR": repetition_rate(inputs.detections, vocab.singleton_rules),
        "FID": fid_from_features(inputs.features_real, inputs.features_generated),
        "CS": clip_score(inputs.image_embeddings, inputs.text_embeddings),
    }
    counts = {
        "AS": len(inputs.aesthetic_scores),
        "SFR": len(inputs.expectations),
        "SA": len(inputs.expectations),
        "HFR": len(inputs.expectations),
        "FRR": len(inputs.detections),
        "FID": inputs.features_generated.n,
        "CS": int(np.asarray(inputs.image_embeddings).shape[0]),
    }
    return MetricReport(values=values, counts=counts)
