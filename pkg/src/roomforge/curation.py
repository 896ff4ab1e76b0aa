"""Designer-rating aggregation and nested data-tier assembly.

Tiers nest: the premium tier (top fraction of rated images) is a subset
of the curated tier (survivors of a stricter rule profile, size-capped
by aesthetic ordering), which is a subset of the screen tier (the input
manifest, assumed already screened). All selections are deterministic:
ties are totally ordered by documented keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .filtering.engine import DropReport, evaluate_image
from .filtering.rules import RuleSet
from .manifest import ImageRecord


class CurationError(ValueError):
    pass


@dataclass(frozen=True)
class RatingBallot:
    image_id: str
    rater_id: str
    level: int

    def __post_init__(self):
        if self.level not in (1, 2, 3, 4, 5):
            raise CurationError(f"rating level must be 1..5, got {self.level!r}")


@dataclass(frozen=True)
class RatedImage:
    image_id: str
    count: int
    mean_level: float
    under_rated: bool = False      # fewer ballots than the configured minimum


def aggregate_ratings(ballots: Iterable[RatingBallot], min_ballots: int = 3) -> list[RatedImage]:
    """Per-image arithmetic mean of ballot levels.

    Duplicate (image, rater) pairs are rejected. Images with fewer than
    min_ballots ballots are flagged under_rated but still aggregated.
    Output is sorted by image id.
    """
    sums: dict[str, int] = {}
    counts: dict[str, int] = {}
    seen: set[tuple[str, str]] = set()
    for ballot in ballots:
        key = (ballot.image_id, ballot.rater_id)
        if key in seen:
            raise CurationError(f"duplicate ballot for image {key[0]!r} by rater {key[1]!r}")
        seen.add(key)
        sums[ballot.image_id] = sums.get(ballot.image_id, 0) + ballot.level
        counts[ballot.image_id] = counts.get(ballot.image_id, 0) + 1
    return [
        RatedImage(
            image_id=image_id,
            count=counts[image_id],
            mean_level=sums[image_id] / counts[image_id],
            under_rated=counts[image_id] < min_ballots,
        )
        for image_id in sorted(sums)
    ]


def select_top_fraction(rated: Sequence[RatedImage], fraction: float) -> set[str]:
    """The ceil(fraction * n) highest-mean image ids.

    Ordering: mean level descending, then ballot count descending, then
    image id ascending; the cut is deterministic under ties.
    """
    if not 0.0 < fraction <= 1.0:
        raise CurationError(f"fraction must be in (0, 1], got {fraction}")
    if not rated:
        raise CurationError("no rated images to select from")
    k = math.ceil(fraction * len(rated))
    ordered = sorted(rated, key=lambda r: (-r.mean_level, -r.count, r.image_id))
    return {r.image_id for r in ordered[:k]}


@dataclass
class CurationConfig:
    curated_cap: int = 100_000
    premium_cap: int = 5_000
    premium_fraction: float = 0.10
    aesthetic_key: str = "aesthetics.realism"   # curated-tier ordering label


@dataclass
class LayeredDataset:
    tiers: dict[str, str]                   # image id -> screen | curated | premium
    screen: set[str] = field(default_factory=set)
    curated: set[str] = field(default_factory=set)
    premium: set[str] = field(default_factory=set)
    curated_drop_report: DropReport | None = None

    def tier_rows(self) -> list[dict[str, str]]:
        return [
            {"image_id": image_id, "tier": self.tiers[image_id]}
            for image_id in sorted(self.tiers)
        ]


def build_layers(
    records: Sequence[ImageRecord],
    strict_rules: RuleSet,
    ratings: Sequence[RatedImage],
    config: CurationConfig | None = None,
) -> LayeredDataset:
    """Assemble the nested screen / curated / premium tiers.

    The input records form the screen tier (they are the survivors of
    the general screening pass). The curated tier applies the stricter
    rule profile and keeps at most curated_cap records ordered by the
    configured aesthetic label (descending, id-tiebroken). The premium
    tier is the top premium_fraction of rated curated images, capped at
    premium_cap.
    """
    config = config or CurationConfig()
    want_premium = config.premium_fraction > 0
    if want_premium and not ratings:
        raise CurationError("premium tier requested but no ratings supplied")

    screen = {rec.id for rec in records}

    report = DropReport()
    curated_candidates: list[ImageRecord] = []
    for rec in records:
        verdict = evaluate_image(rec.labels, strict_rules)
        if verdict.decision == "keep":
            report.kept += 1
            curated_candidates.append(rec)
        else:
            report.dropped += 1
            reason = verdict.deciding_reason or "unspecified"
            report.reasons[reason] = report.reasons.get(reason, 0) + 1

    def aesthetic_value(rec: ImageRecord) -> float:
        value = rec.labels.get(config.aesthetic_key, 0.0)
        return float(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else 0.0

    curated_candidates.sort(key=lambda rec: (-aesthetic_value(rec), rec.id))
    curated = {rec.id for rec in curated_candidates[: config.curated_cap]}

    rated_curated = [r for r in ratings if r.image_id in curated]
    if want_premium and rated_curated:
        premium = select_top_fraction(rated_curated, config.premium_fraction)
        if len(premium) > config.premium_cap:
            ordered = sorted(
                (r for r in rated_curated if r.image_id in premium),
                key=lambda r: (-r.mean_level, -r.count, r.image_id),
            )
            premium = {r.image_id for r in ordered[: config.premium_cap]}
    else:
        premium = set()

    tiers: dict[str, str] = {}
    for image_id in screen:
        if image_id in premium:
            tiers[image_id] = "premium"
        elif image_id in curated:
            tiers[image_id] = "curated"
        else:
            tiers[image_id] = "screen"
    return LayeredDataset(
        tiers=tiers,
        screen=screen,
        curated=curated,
        premium=premium,
        curated_drop_report=report,
    )
