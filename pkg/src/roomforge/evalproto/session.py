"""GSB session model: blinded assignments, judgments, aggregation.

Evaluators see anonymous left/right pairs; which side carries system A
is the parity of a documented hash (see roomforge.rng.blind_hash) of the
session seed, item id and evaluator id. Raw left/right choices are
un-blinded to A-relative good/bad at recording time; "same" is
side-independent. Per (item, dimension) the outcome is the strict
majority choice, or exclusion when no choice exceeds half the votes.
Win rate removes "same": good / (good + bad), null when undefined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..rng import blind_hash

GOOD, SAME, BAD = "good", "same", "bad"
LEFT, RIGHT = "left", "right"
A_LEFT, A_RIGHT = "A_left", "A_right"

DEFAULT_MIN_PER_ITEM = 3
DEFAULT_DIMENSIONS = ("aesthetic", "alignment", "layout")


class SessionError(ValueError):
    pass


@dataclass(frozen=True)
class GsbItem:
    item_id: str
    prompt: str
    image_a: str
    image_b: str


@dataclass(frozen=True)
class GsbSession:
    session_id: str
    dimensions: tuple[str, ...]
    items: tuple[GsbItem, ...]
    roster: tuple[str, ...]
    seed: int
    min_per_item: int = DEFAULT_MIN_PER_ITEM
    closed: bool = False

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "dimensions": list(self.dimensions),
            "items": [
                {"item_id": i.item_id, "prompt": i.prompt, "image_a": i.image_a, "image_b": i.image_b}
                for i in self.items
            ],
            "roster": list(self.roster),
            "seed": self.seed,
            "min_per_item": self.min_per_item,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GsbSession":
        return cls(
            session_id=obj["session_id"],
            dimensions=tuple(obj["dimensions"]),
            items=tuple(
                GsbItem(
                    item_id=i["item_id"],
                    prompt=i["prompt"],
                    image_a=i["image_a"],
                    image_b=i["image_b"],
                )
                for i in obj["items"]
            ),
            roster=tuple(obj["roster"]),
            seed=obj["seed"],
            min_per_item=obj.get("min_per_item", DEFAULT_MIN_PER_ITEM),
        )


def create_session(
    session_id: str,
    prompts: Sequence[tuple[str, str]],          # (prompt id, prompt text)
    images_a: Sequence[str],
    images_b: Sequence[str],
    roster: Sequence[str],
    seed: int,
    dimensions: Sequence[str] = DEFAULT_DIMENSIONS,
    min_per_item: int = DEFAULT_MIN_PER_ITEM,
) -> GsbSession:
    """Build a session; items are ordered by prompt id."""
    if not prompts:
        raise SessionError("session needs at least one prompt")
    if len(images_a) != len(prompts) or len(images_b) != len(prompts):
        raise SessionError(
            f"image lists must match prompts: {len(prompts)} prompts, "
            f"{len(images_a)} A refs, {len(images_b)} B refs"
        )
    if min_per_item < 1:
        raise SessionError("min_per_item must be >= 1")
    if len(set(roster)) != len(roster):
        raise SessionError("duplicate evaluator in roster")
    if len(roster) < min_per_item:
        raise SessionError(f"roster of {len(roster)} cannot cover {min_per_item} evaluators per item")
    if not dimensions:
        raise SessionError("session needs at least one dimension")
    order = sorted(range(len(prompts)), key=lambda i: prompts[i][0])
    items = tuple(
        GsbItem(item_id=prompts[i][0], prompt=prompts[i][1], image_a=images_a[i], image_b=images_b[i])
        for i in order
    )
    ids = [i.item_id for i in items]
    if len(set(ids)) != len(ids):
        raise SessionError("duplicate prompt id")
    return GsbSession(
        session_id=session_id,
        dimensions=tuple(dimensions),
        items=items,
        roster=tuple(roster),
        seed=seed,
        min_per_item=min_per_item,
    )


@dataclass(frozen=True)
class ItemAssignment:
    item_id: str
    evaluator: str
    dimension: str
    side: str          # A_left | A_right


def side_order(seed: int, item_id: str, evaluator: str) -> str:
    """Deterministic blinding: even hash parity puts system A on the left."""
    return A_LEFT if blind_hash(seed, item_id, evaluator) & 1 == 0 else A_RIGHT


def assign_items(session: GsbSession, min_per_item: int | None = None) -> list[ItemAssignment]:
    """Cover each (item, dimension) with exactly min_per_item evaluators.

    Evaluators are drawn round-robin from the roster with a cursor that
    runs across all (dimension, item) pairs in order, so per-evaluator
    load differs by at most one. Side order depends only on (seed, item,
    evaluator), never on the assignment sequence.
    """
    need = session.min_per_item if min_per_item is None else min_per_item
    roster = session.roster
    if len(roster) < need:
        raise SessionError(f"roster of {len(roster)} cannot cover {need} evaluators per item")
    assignments: list[ItemAssignment] = []
    cursor = 0
    for dimension in session.dimensions:
        for item in session.items:
            for _ in range(need):
                evaluator = roster[cursor % len(roster)]
                cursor += 1
                assignments.append(
                    ItemAssignment(
                        item_id=item.item_id,
                        evaluator=evaluator,
                        dimension=dimension,
                        side=side_order(session.seed, item.item_id, evaluator),
                    )
                )
    return assignments


def unblind(side: str, raw_choice: str) -> str:
    """Map a left/right/same choice to A-relative good/same/bad."""
    if raw_choice == SAME:
        return SAME
    if raw_choice not in (LEFT, RIGHT):
        raise SessionError(f"choice must be left, right or same, got {raw_choice!r}")
    if side not in (A_LEFT, A_RIGHT):
        raise SessionError(f"invalid side order {side!r}")
    prefers_a = (raw_choice == LEFT) == (side == A_LEFT)
    return GOOD if prefers_a else BAD


@dataclass(frozen=True)
class Judgment:
    item_id: str
    evaluator: str
    dimension: str
    choice: str          # A-relative: good | same | bad
    raw_choice: str      # as submitted: left | right | same
    timestamp: float


@dataclass(frozen=True)
class ItemAggregate:
    item_id: str
    dimension: str
    outcome: str         # good | same | bad | excluded
    votes: Mapping[str, int]


def aggregate_item(judgments: Sequence[Judgment], min_per_item: int = DEFAULT_MIN_PER_ITEM) -> ItemAggregate:
    """Strict-majority outcome for one (item, dimension)'s judgments."""
    if not judgments:
        raise SessionError("no judgments to aggregate")
    item_id = judgments[0].item_id
    dimension = judgments[0].dimension
    for j in judgments:
        if j.item_id != item_id or j.dimension != dimension:
            raise SessionError("judgments span multiple (item, dimension) pairs")
    if len(judgments) < min_per_item:
        raise SessionError(
            f"{item_id}/{dimension}: {len(judgments)} judgments, need at least {min_per_item}"
        )
    votes = {GOOD: 0, SAME: 0, BAD: 0}
    for j in judgments:
        votes[j.choice] += 1
    total = len(judgments)
    outcome = "excluded"
    for choice, count in votes.items():
        if count * 2 > total:
            outcome = choice
            break
    return ItemAggregate(item_id=item_id, dimension=dimension, outcome=outcome, votes=votes)


@dataclass(frozen=True)
class DimensionSummary:
    good: int = 0
    same: int = 0
    bad: int = 0
    excluded: int = 0

    @property
    def win_rate(self) -> float | None:
        decided = self.good + self.bad
        return self.good / decided if decided else None

    def to_dict(self) -> dict:
        return {
            "good": self.good,
            "same": self.same,
            "bad": self.bad,
            "excluded": self.excluded,
            "win_rate": self.win_rate,
        }


@dataclass(frozen=True)
class GsbSummary:
    session_id: str
    dimensions: Mapping[str, DimensionSummary]
    incomplete_items: int = 0

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "dimensions": {d: s.to_dict() for d, s in self.dimensions.items()},
            "incomplete_items": self.incomplete_items,
        }


def summarize(
    session: GsbSession,
    judgments: Iterable[Judgment],
    min_per_item: int | None = None,
) -> GsbSummary:
    """Aggregate all items and tally per-dimension outcomes.

    Items with fewer than min_per_item judgments for a dimension are
    counted as incomplete and kept out of the statistics.
    """
    need = session.min_per_item if min_per_item is None else min_per_item
    grouped: dict[tuple[str, str], list[Judgment]] = {}
    for j in judgments:
        grouped.setdefault((j.item_id, j.dimension), []).append(j)

    tallies = {d: {GOOD: 0, SAME: 0, BAD: 0, "excluded": 0} for d in session.dimensions}
    incomplete = 0
    for item in session.items:
        for dimension in session.dimensions:
            group = grouped.get((item.item_id, dimension), [])
            if len(group) < need:
                incomplete += 1
                continue
            aggregate = aggregate_item(group, min_per_item=need)
            tallies[dimension][aggregate.outcome] += 1
    return GsbSummary(
        session_id=session.session_id,
        dimensions={
            d: DimensionSummary(
                good=t[GOOD], same=t[SAME], bad=t[BAD], excluded=t["excluded"]
            )
            for d, t in tallies.items()
        },
        incomplete_items=incomplete,
    )
