"""Dual evaluation gate and the GSB human-evaluation protocol."""

from .eventlog import Event, EventLog, EventLogError
from .gate import DEFAULT_THRESHOLD, GateDecision, GateError, MetricOutcome, dual_gate
from .session import (
    BAD,
    GOOD,
    SAME,
    DimensionSummary,
    GsbItem,
    GsbSession,
    GsbSummary,
    ItemAggregate,
    ItemAssignment,
    Judgment,
    SessionError,
    aggregate_item,
    assign_items,
    create_session,
    side_order,
    summarize,
    unblind,
)
from .store import (
    DuplicateJudgmentError,
    NotAssignedError,
    SessionClosedError,
    SessionState,
    SessionStore,
    UnknownSessionError,
)

__all__ = [
    "Event",
    "EventLog",
    "EventLogError",
    "DEFAULT_THRESHOLD",
    "GateDecision",
    "GateError",
    "MetricOutcome",
    "dual_gate",
    "BAD",
    "GOOD",
    "SAME",
    "DimensionSummary",
    "GsbItem",
    "GsbSession",
    "GsbSummary",
    "ItemAggregate",
    "ItemAssignment",
    "Judgment",
    "SessionError",
    "aggregate_item",
    "assign_items",
    "create_session",
    "side_order",
    "summarize",
    "unblind",
    "DuplicateJudgmentError",
    "NotAssignedError",
    "SessionClosedError",
    "SessionState",
    "SessionStore",
    "UnknownSessionError",
]
