"""Multi-aspect bucket generation, assignment and epoch scheduling.

Buckets are the feasible (width, height) grid under the configured
constraints. Images go to the bucket minimizing the log-aspect distance
|ln(w/h) - ln(bw/bh)|, which treats 2:1 and 1:2 symmetrically. Epoch
schedules draw every iteration's bucket with probability proportional to
that bucket's remaining unscheduled image count, so large buckets are
neither starved nor exhausted early; per-bucket order is a seeded
shuffle. All randomness flows through one Xoshiro256StarStar stream in a
fixed documented order (shuffles in bucket order, then the iteration
loop), making schedules bit-reproducible from (inputs, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Iterable

from .rng import Xoshiro256StarStar


class BucketError(ValueError):
    pass


@dataclass(frozen=True)
class Bucket:
    id: int
    width: int
    height: int

    @property
    def aspect(self) -> float:
        return self.width / self.height


@dataclass(frozen=True)
class BucketPlan:
    buckets: tuple[Bucket, ...]
    quantum: int
    min_side: int
    max_side: int
    max_pixels: int

    def __post_init__(self):
        if not self.buckets:
            raise BucketError("bucket plan is empty")
        seen = set()
        for b in self.buckets:
            if (b.width, b.height) in seen:
                raise BucketError(f"duplicate bucket {b.width}x{b.height}")
            seen.add((b.width, b.height))

    def bucket(self, bucket_id: int) -> Bucket:
        return self.buckets[bucket_id]

    def max_adjacent_aspect_ratio(self) -> float:
        """Largest ratio between consecutive distinct aspects in the plan.

        Distortion of any in-range image resized to its closest bucket is
        bounded by [1/r, r] for this r.
        """
        aspects = sorted({b.aspect for b in self.buckets})
        if len(aspects) < 2:
            return 1.0
        return max(b / a for a, b in zip(aspects, aspects[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "quantum": self.quantum,
            "min_side": self.min_side,
            "max_side": self.max_side,
            "max_pixels": self.max_pixels,
            "buckets": [
                {"id": b.id, "width": b.width, "height": b.height} for b in self.buckets
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "BucketPlan":
        buckets = tuple(
            Bucket(id=e["id"], width=e["width"], height=e["height"]) for e in obj["buckets"]
        )
        return cls(
            buckets=buckets,
            quantum=obj["quantum"],
            min_side=obj["min_side"],
            max_side=obj["max_side"],
            max_pixels=obj["max_pixels"],
        )


def generate_buckets(quantum: int, min_side: int, max_side: int, max_pixels: int) -> BucketPlan:
    """Enumerate every feasible bucket and return the sorted plan.

    Feasible: width and height are multiples of quantum in
    [min_side, max_side] and width*height <= max_pixels. Sorted by aspect
    then width; ids are positions in that order.
    """
    if quantum < 1:
        raise BucketError("quantum must be >= 1")
    if min_side > max_side:
        raise BucketError(f"min_side {min_side} exceeds max_side {max_side}")
    if max_pixels < min_side * min_side:
        raise BucketError("max_pixels admits no bucket")
    start = ((min_side + quantum - 1) // quantum) * quantum
    sides = list(range(start, max_side + 1, quantum))
    pairs = [
        (w, h)
        for w in sides
        for h in sides
        if w * h <= max_pixels
    ]
    if not pairs:
        raise BucketError("constraints admit no bucket")
    pairs.sort(key=lambda wh: (wh[0] / wh[1], wh[0]))
    buckets = tuple(Bucket(id=i, width=w, height=h) for i, (w, h) in enumerate(pairs))
    return BucketPlan(
        buckets=buckets,
        quantum=quantum,
        min_side=min_side,
        max_side=max_side,
        max_pixels=max_pixels,
    )


@dataclass(frozen=True)
class Assignment:
    image_id: str
    bucket_id: int
    distance: float
    width: int
    height: int


def assign_bucket(width: int, height: int, plan: BucketPlan, image_id: str = "") -> Assignment:
    """Pick the bucket minimizing |ln(w/h) - ln(bw/bh)|.

    Ties break toward larger bucket area, then smaller bucket width.
    """
    if width <= 0 or height <= 0:
        raise BucketError(f"image dimensions must be positive, got {width}x{height}")
    log_aspect = math.log(width / height)
    best: Bucket | None = None
    best_key: tuple[float, int, int] | None = None
    for b in plan.buckets:
        d = abs(log_aspect - math.log(b.aspect))
        key = (d, -(b.width * b.height), b.width)
        if best_key is None or key < best_key:
            best, best_key = b, key
    assert best is not None and best_key is not None
    return Assignment(
        image_id=image_id,
        bucket_id=best.id,
        distance=best_key[0],
        width=width,
        height=height,
    )


@dataclass(frozen=True)
class ResolutionCondition:
    target_width: int
    target_height: int
    original_width: int
    original_height: int

    def to_dict(self) -> dict[str, int]:
        return {
            "target_w": self.target_width,
            "target_h": self.target_height,
            "orig_w": self.original_width,
            "orig_h": self.original_height,
        }


@dataclass(frozen=True)
class ResizeSpec:
    image_id: str
    source_width: int
    source_height: int
    dest_width: int
    dest_height: int
    distortion: float
    crop: None = None     # cropping is never performed


def resize_spec(width: int, height: int, bucket: Bucket, image_id: str = "") -> ResizeSpec:
    """Resize-only preprocessing spec; records the aspect distortion."""
    if width <= 0 or height <= 0:
        raise BucketError(f"image dimensions must be positive, got {width}x{height}")
    distortion = (width / height) / bucket.aspect
    return ResizeSpec(
        image_id=image_id,
        source_width=width,
        source_height=height,
        dest_width=bucket.width,
        dest_height=bucket.height,
        distortion=distortion,
    )


@dataclass(frozen=True)
class Iteration:
    index: int
    bucket_id: int
    image_ids: tuple[str, ...]
    conditions: tuple[ResolutionCondition, ...]


@dataclass(frozen=True)
class EpochSchedule:
    seed: int
    batch_size: int
    iterations: tuple[Iteration, ...]

    def iter_lines(self, plan: BucketPlan) -> Iterable[str]:
        for it in self.iterations:
            b = plan.bucket(it.bucket_id)
            yield json.dumps(
                {
                    "iter": it.index,
                    "bucket_id": it.bucket_id,
                    "target_w": b.width,
                    "target_h": b.height,
                    "image_ids": list(it.image_ids),
                    "conditions": [c.to_dict() for c in it.conditions],
                },
                sort_keys=True,
            )


def plan_epoch(
    assignments: list[Assignment],
    plan: BucketPlan,
    batch_size: int,
    seed: int,
    uniform_buckets: bool = False,
) -> EpochSchedule:
    """Produce one epoch's deterministic iteration order.

    Draw order (fixed for reproducibility): first each non-empty bucket's
    image list is shuffled, in bucket-id order; then iterations pick a
    bucket (weighted by remaining count, or uniformly over non-empty
    buckets with uniform_buckets) and consume up to batch_size images
    from its queue. Final partial batches are kept.
    """
    if batch_size < 1:
        raise BucketError("batch_size must be >= 1")
    if not assignments:
        raise BucketError("no assignments to schedule")
    rng = Xoshiro256StarStar(seed)

    queues: dict[int, list[Assignment]] = {}
    for a in assignments:
        queues.setdefault(a.bucket_id, []).append(a)
    bucket_ids = sorted(queues)
    for bid in bucket_ids:
        rng.shuffle(queues[bid])
    cursors = {bid: 0 for bid in bucket_ids}

    iterations: list[Iteration] = []
    remaining = {bid: len(queues[bid]) for bid in bucket_ids}
    index = 0
    while any(remaining[bid] for bid in bucket_ids):
        live = [bid for bid in bucket_ids if remaining[bid] > 0]
        if uniform_buckets:
            chosen = live[rng.next_below(len(live))]
        else:
            weights = [remaining[bid] for bid in live]
            chosen = live[rng.weighted_index(weights)]
        take = min(batch_size, remaining[chosen])
        start = cursors[chosen]
        batch = queues[chosen][start : start + take]
        cursors[chosen] += take
        remaining[chosen] -= take
        bucket = plan.bucket(chosen)
        conditions = tuple(
            ResolutionCondition(bucket.width, bucket.height, a.width, a.height) for a in batch
        )
        iterations.append(
            Iteration(
                index=index,
                bucket_id=chosen,
                image_ids=tuple(a.image_id for a in batch),
                conditions=conditions,
            )
        )
        index += 1
    return EpochSchedule(seed=seed, batch_size=batch_size, iterations=tuple(iterations))
