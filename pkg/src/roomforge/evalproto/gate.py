"""The automated-metrics gate in front of human evaluation.

A candidate passes when strictly more than the threshold fraction of
metrics improve over the baseline (default 0.70, so 5 of 7 metrics).
Improvement is strict per metric direction; equality never counts.
An inclusive mode (>=) exists for sensitivity checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..metrics.report import DIRECTIONS, MetricReport

DEFAULT_THRESHOLD = 0.70


class GateError(ValueError):
    pass


@dataclass(frozen=True)
class MetricOutcome:
    metric: str
    baseline: float
    candidate: float
    direction: str
    improved: bool


@dataclass(frozen=True)
class GateDecision:
    outcomes: tuple[MetricOutcome, ...]
    improved: int
    total: int
    threshold: float
    inclusive: bool
    passed: bool

    @property
    def improved_fraction(self) -> float:
        return self.improved / self.total

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "improved": self.improved,
            "total": self.total,
            "improved_fraction": self.improved_fraction,
            "threshold": self.threshold,
            "inclusive": self.inclusive,
            "metrics": {
                o.metric: {
                    "baseline": o.baseline,
                    "candidate": o.candidate,
                    "direction": o.direction,
                    "improved": o.improved,
                }
                for o in self.outcomes
            },
        }


def dual_gate(
    baseline: MetricReport,
    candidate: MetricReport,
    directions: Mapping[str, str] | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    inclusive: bool = False,
) -> GateDecision:
    """Decide whether the candidate advances to human evaluation."""
    base_names = set(baseline.values)
    cand_names = set(candidate.values)
    if base_names != cand_names:
        raise GateError(
            f"metric names differ: baseline-only {sorted(base_names - cand_names)}, "
            f"candidate-only {sorted(cand_names - base_names)}"
        )
    resolved: dict[str, str] = {}
    for name in base_names:
        direction = (directions or {}).get(name) or baseline.directions.get(name) or DIRECTIONS.get(name)
        if direction not in ("up", "down"):
            raise GateError(f"metric {name!r} has no declared direction")
        resolved[name] = direction

    outcomes = []
    for name in sorted(base_names):
        b = baseline.values[name]
        c = candidate.values[name]
        improved = c > b if resolved[name] == "up" else c < b
        outcomes.append(
            MetricOutcome(metric=name, baseline=b, candidate=c, direction=resolved[name], improved=improved)
        )
    improved_count = sum(1 for o in outcomes if o.improved)
    fraction = improved_count / len(outcomes)
    passed = fraction >= threshold if inclusive else fraction > threshold
    return GateDecision(
        outcomes=tuple(outcomes),
        improved=improved_count,
        total=len(outcomes),
        threshold=threshold,
        inclusive=inclusive,
        passed=passed,
    )
