"""Live session state on top of the event log.

Three event kinds rebuild everything: session_created (full session
spec; assignments are a pure function of it and are re-derived, not
logged), judgment_recorded, session_closed. Every write appends to the
log -- and is flushed -- before the in-memory state changes, so a crash
can lose an acknowledgment but never an acknowledged write. Writes for
a session are serialized through a per-session lock; reads take
snapshots without blocking writers of other sessions.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Sequence

from .eventlog import Event, EventLog
from .session import (
    GsbSession,
    GsbSummary,
    ItemAssignment,
    Judgment,
    SessionError,
    assign_items,
    create_session,
    summarize,
    unblind,
)


class DuplicateJudgmentError(SessionError):
    pass


class NotAssignedError(SessionError):
    pass


class SessionClosedError(SessionError):
    pass


class UnknownSessionError(SessionError):
    pass


@dataclass
class SessionState:
    session: GsbSession
    assignments: list[ItemAssignment]
    by_key: dict[tuple[str, str, str], ItemAssignment] = field(default_factory=dict)
    judgments: dict[tuple[str, str, str], Judgment] = field(default_factory=dict)
    closed: bool = False

    def __post_init__(self):
        if not self.by_key:
            self.by_key = {
                (a.item_id, a.evaluator, a.dimension): a for a in self.assignments
            }

    def queue_for(self, evaluator: str, dimension: str) -> list[ItemAssignment]:
        return [
            a for a in self.assignments if a.evaluator == evaluator and a.dimension == dimension
        ]


class SessionStore:
    def __init__(self, log: EventLog | None = None):
        self.log = log or EventLog(None)
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.log.replay_into(self._apply)

    # -- event application (shared by live path and replay) ---------------

    def _apply(self, event: Event) -> None:
        payload = event.payload
        if event.kind == "session_created":
            session = GsbSession.from_dict(payload)
            self._sessions[session.session_id] = SessionState(
                session=session, assignments=assign_items(session)
            )
        elif event.kind == "judgment_recorded":
            state = self._sessions[payload["session_id"]]
            judgment = Judgment(
                item_id=payload["item_id"],
                evaluator=payload["evaluator"],
                dimension=payload["dimension"],
                choice=payload["choice"],
                raw_choice=payload["raw_choice"],
                timestamp=payload["timestamp"],
            )
            key = (judgment.item_id, judgment.evaluator, judgment.dimension)
            state.judgments[key] = judgment
        elif event.kind == "session_closed":
            self._sessions[payload["session_id"]].closed = True
        else:
            raise SessionError(f"unknown event kind {event.kind!r}")

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- commands ----------------------------------------------------------

    def create_session(
        self,
        session_id: str,
        prompts: Sequence[tuple[str, str]],
        images_a: Sequence[str],
        images_b: Sequence[str],
        roster: Sequence[str],
        seed: int,
        dimensions: Sequence[str],
        min_per_item: int = 3,
    ) -> GsbSession:
        with self._lock_for(session_id):
            if session_id in self._sessions:
                raise SessionError(f"session {session_id!r} already exists")
            session = create_session(
                session_id, prompts, images_a, images_b, roster, seed,
                dimensions=dimensions, min_per_item=min_per_item,
            )
            self.log.append("session_created", session.to_dict())
            self._sessions[session_id] = SessionState(
                session=session, assignments=assign_items(session)
            )
            return session

    def state(self, session_id: str) -> SessionState:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no session {session_id!r}") from None

    def record_judgment(
        self,
        session_id: str,
        evaluator: str,
        item_id: str,
        dimension: str,
        raw_choice: str,
        timestamp: float | None = None,
    ) -> Judgment:
        """Un-blind and durably record one judgment."""
        with self._lock_for(session_id):
            state = self.state(session_id)
            if state.closed:
                raise SessionClosedError(f"session {session_id!r} is closed")
            key = (item_id, evaluator, dimension)
            assignment = state.by_key.get(key)
            if assignment is None:
                raise NotAssignedError(
                    f"evaluator {evaluator!r} is not assigned item {item_id!r} for {dimension!r}"
                )
            if key in state.judgments:
                raise DuplicateJudgmentError(
                    f"judgment for {item_id!r}/{dimension!r} by {evaluator!r} already recorded"
                )
            choice = unblind(assignment.side, raw_choice)
            judgment = Judgment(
                item_id=item_id,
                evaluator=evaluator,
                dimension=dimension,
                choice=choice,
                raw_choice=raw_choice,
                timestamp=time.time() if timestamp is None else timestamp,
            )
            self.log.append(
                "judgment_recorded",
                {
                    "session_id": session_id,
                    "item_id": judgment.item_id,
                    "evaluator": judgment.evaluator,
                    "dimension": judgment.dimension,
                    "choice": judgment.choice,
                    "raw_choice": judgment.raw_choice,
                    "timestamp": judgment.timestamp,
                },
            )
            state.judgments[key] = judgment
            return judgment

    def close_session(self, session_id: str) -> None:
        with self._lock_for(session_id):
            state = self.state(session_id)
            if not state.closed:
                self.log.append("session_closed", {"session_id": session_id})
                state.closed = True

    # -- queries -------------------------------------------------------

    def next_assignment(
        self, session_id: str, evaluator: str, dimension: str, offset: int = 0
    ) -> tuple[ItemAssignment | None, int, int]:
        """(offset-th unjudged assignment or None, judged count, total).

        offset 0 is the item to judge now; offset 1 lets clients preload
        the following pair.
        """
        state = self.state(session_id)
        queue = state.queue_for(evaluator, dimension)
        judged = 0
        pending: list[ItemAssignment] = []
        for a in queue:
            if (a.item_id, a.evaluator, a.dimension) in state.judgments:
                judged += 1
            elif len(pending) <= offset:
                pending.append(a)
        chosen = pending[offset] if len(pending) > offset else None
        return chosen, judged, len(queue)

    def summary(self, session_id: str, allow_partial: bool = False) -> GsbSummary:
        state = self.state(session_id)
        done = len(state.judgments) == len(state.assignments)
        if not (done or state.closed or allow_partial):
            raise SessionError(
                f"session {session_id!r} is still collecting judgments "
                f"({len(state.judgments)}/{len(state.assignments)})"
            )
        return summarize(state.session, state.judgments.values())
