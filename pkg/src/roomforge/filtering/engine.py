"""Rule evaluation over label sets and manifest-scale screening.

Verdict semantics: rules are evaluated in file order and every rule whose
predicate holds contributes its reason. The first firing rule whose
action is ``keep`` or ``drop`` decides the record (``tag`` rules never
decide); if no decisive rule fires the record is kept. This gives keep
rules override power over any drop rule listed after them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from ..manifest import ImageRecord, ManifestError, iter_manifest
from .rules import RuleSet


@dataclass(frozen=True)
class FilterVerdict:
    decision: str                 # keep | drop
    reasons: tuple[str, ...]      # reasons of all firing rules, in rule order
    deciding_reason: str | None   # reason of the rule that decided, if any


@dataclass
class DropReport:
    kept: int = 0
    dropped: int = 0
    malformed: int = 0
    reasons: dict[str, int] = field(default_factory=dict)
    malformed_lines: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kept": self.kept,
            "dropped": self.dropped,
            "malformed": self.malformed,
            "reasons": dict(sorted(self.reasons.items())),
            "malformed_lines": list(self.malformed_lines),
        }


def evaluate_image(labels: dict[str, Any], rules: RuleSet) -> FilterVerdict:
    """Evaluate every rule against one label set.

    Raises MissingLabelError if a rule references a key absent from the
    label set.
    """
    reasons: list[str] = []
    decision: str | None = None
    deciding: str | None = None
    for rule in rules.rules:
        if rule.predicate.evaluate(labels):
            reasons.append(rule.reason)
            if decision is None and rule.action in ("keep", "drop"):
                decision = rule.action
                deciding = rule.reason
    return FilterVerdict(
        decision=decision or "keep",
        reasons=tuple(reasons),
        deciding_reason=deciding if decision == "drop" else None,
    )


def filter_records(
    records: Iterable[ImageRecord], rules: RuleSet, report: DropReport
) -> Iterator[ImageRecord]:
    """Evaluate records lazily, yielding survivors in input order."""
    for rec in records:
        verdict = evaluate_image(rec.labels, rules)
        if verdict.decision == "keep":
            report.kept += 1
            yield rec
        else:
            report.dropped += 1
            reason = verdict.deciding_reason or "unspecified"
            report.reasons[reason] = report.reasons.get(reason, 0) + 1


def filter_manifest(
    lines: Iterable[str], rules: RuleSet
) -> tuple[list[ImageRecord], DropReport]:
    """Screen a whole manifest stream.

    Malformed lines are counted (with their line numbers) and skipped;
    they never abort the run. Kept records preserve input order.
    """
    report = DropReport()
    valid: list[ImageRecord] = []
    for line_number, item in iter_manifest(lines):
        if isinstance(item, ManifestError):
            report.malformed += 1
            report.malformed_lines.append(line_number)
            continue
        valid.append(item)
    kept = list(filter_records(valid, rules, report))
    return kept, report
