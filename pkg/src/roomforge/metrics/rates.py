"""Embedding-agreement and detection-based rate metrics.

All rates are percentages in [0, 100]. Inputs are precomputed artifacts:
embeddings, detection records and prompt expectations; no pixels or
models are touched here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class MetricInputError(ValueError):
    pass


@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    room: str
    objects: Mapping[str, int] = field(default_factory=dict)   # class -> count, counts >= 1
    style: str = ""
    hard_elements: frozenset[str] = frozenset()

    def __post_init__(self):
        for cls, count in self.objects.items():
            if count < 1:
                raise MetricInputError(f"{self.image_id}: count for {cls!r} must be >= 1")

    @classmethod
    def from_dict(cls, obj: dict) -> "DetectionRecord":
        return cls(
            image_id=obj["image_id"],
            room=obj.get("room", ""),
            objects=dict(obj.get("objects") or {}),
            style=obj.get("style", ""),
            hard_elements=frozenset(obj.get("hard_elements") or ()),
        )


@dataclass(frozen=True)
class PromptExpectation:
    image_id: str
    furniture: frozenset[str] = frozenset()
    style: str = ""
    hard_elements: frozenset[str] = frozenset()

    @classmethod
    def from_dict(cls, obj: dict) -> "PromptExpectation":
        return cls(
            image_id=obj["image_id"],
            furniture=frozenset(obj.get("furniture") or ()),
            style=obj.get("style", ""),
            hard_elements=frozenset(obj.get("hard_elements") or ()),
        )


def clip_score(
    image_embeddings: np.ndarray,
    text_embeddings: np.ndarray,
    scale: float = 100.0,
) -> float:
    """Mean over pairs of scale * max(cosine similarity, 0)."""
    img = np.asarray(image_embeddings, dtype=np.float64)
    txt = np.asarray(text_embeddings, dtype=np.float64)
    if img.shape != txt.shape:
        raise MetricInputError(f"embedding shapes differ: {img.shape} vs {txt.shape}")
    if img.ndim != 2 or img.shape[0] == 0:
        raise MetricInputError("embeddings must be a non-empty (n, d) matrix")
    img_norm = np.linalg.norm(img, axis=1)
    txt_norm = np.linalg.norm(txt, axis=1)
    if (img_norm == 0).any() or (txt_norm == 0).any():
        raise MetricInputError("zero-norm embedding encountered")
    cosines = (img * txt).sum(axis=1) / (img_norm * txt_norm)
    return float(np.mean(scale * np.clip(cosines, 0.0, None)))


def aesthetic_score(per_image_scores: Sequence[float]) -> float:
    """Arithmetic mean of per-image scores, each required in [0, 100]."""
    if len(per_image_scores) == 0:
        raise MetricInputError("no aesthetic scores provided")
    arr = np.asarray(per_image_scores, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise MetricInputError("aesthetic scores must be finite")
    if (arr < 0).any() or (arr > 100).any():
        bad = arr[(arr < 0) | (arr > 100)][0]
        raise MetricInputError(f"aesthetic score {bad} outside [0, 100]")
    return float(arr.mean())


def _detections_by_id(detections: Iterable[DetectionRecord]) -> dict[str, DetectionRecord]:
    return {d.image_id: d for d in detections}


def follow_rate(
    expectations: Sequence[PromptExpectation],
    detections: Iterable[DetectionRecord],
    vocabulary: frozenset[str] | set[str],
    element: str = "furniture",
) -> float:
    """Percent of prompt-required items present in the detections.

    Per-item accounting: every required item across all images counts
    once; images with an empty requirement contribute nothing. The same
    operation serves both the furniture vocabulary and the
    floor/ceiling vocabulary via ``element``.
    """
    if element not in ("furniture", "hard_elements"):
        raise MetricInputError(f"unknown element kind {element!r}")
    by_id = _detections_by_id(detections)
    required_total = 0
    hits = 0
    for exp in expectations:
        required = exp.furniture if element == "furniture" else exp.hard_elements
        if not required:
            continue
        unknown = required - set(vocabulary)
        if unknown:
            raise MetricInputError(f"{exp.image_id}: items {sorted(unknown)} not in vocabulary")
        det = by_id.get(exp.image_id)
        if det is None:
            raise MetricInputError(f"{exp.image_id}: no detection record")
        present = set(det.objects) if element == "furniture" else set(det.hard_elements)
        required_total += len(required)
        hits += len(required & present)
    if required_total == 0:
        raise MetricInputError("no required items in any expectation")
    return 100.0 * hits / required_total


def style_accuracy(
    expectations: Sequence[PromptExpectation],
    detections: Iterable[DetectionRecord],
    styles: frozenset[str] | set[str],
) -> float:
    """Percent of images whose predicted style exactly matches the prompt."""
    by_id = _detections_by_id(detections)
    total = 0
    correct = 0
    for exp in expectations:
        if not exp.style:
            continue
        if exp.style not in styles:
            raise MetricInputError(f"{exp.image_id}: unknown expected style {exp.style!r}")
        det = by_id.get(exp.image_id)
        if det is None:
            raise MetricInputError(f"{exp.image_id}: no detection record")
        if det.style and det.style not in styles:
            raise MetricInputError(f"{exp.image_id}: unknown predicted style {det.style!r}")
        total += 1
        if det.style == exp.style:
            correct += 1
    if total == 0:
        raise MetricInputError("no style expectations present")
    return 100.0 * correct / total


def repetition_rate(
    detections: Sequence[DetectionRecord],
    singleton_rules: Mapping[str, Iterable[str]],
    missing_room: str = "skip",
) -> float:
    """Percent of images containing a duplicated singleton class.

    An image is repetitive iff, for its room type, some class listed in
    singleton_rules appears with count >= 2. Rooms absent from the rules
    are skipped (missing_room="skip") or rejected (="error").
    """
    if missing_room not in ("skip", "error"):
        raise MetricInputError(f"missing_room must be 'skip' or 'error', got {missing_room!r}")
    rules = {room: frozenset(classes) for room, classes in singleton_rules.items()}
    considered = 0
    repetitive = 0
    for det in detections:
        if det.room not in rules:
            if missing_room == "error":
                raise MetricInputError(f"{det.image_id}: room {det.room!r} has no singleton rule")
            continue
        considered += 1
        singles = rules[det.room]
        if any(count >= 2 for cls, count in det.objects.items() if cls in singles):
            repetitive += 1
    if considered == 0:
        raise MetricInputError("no detections matched the singleton rules")
    return 100.0 * repetitive / considered
