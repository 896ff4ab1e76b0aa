"""HTTP service exposing GSB sessions and the metrics gate.

All bodies are JSON. Blinding never leaves the server: queue responses
carry left/right image URLs only, and judgments are submitted as
left/right/same. Images are served as static files from a configured
directory; an optional UI directory can be mounted at the root.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..metrics.report import MetricReport
from .gate import GateError, dual_gate
from .session import A_LEFT
from .store import (
    DuplicateJudgmentError,
    NotAssignedError,
    SessionClosedError,
    SessionError,
    SessionStore,
    UnknownSessionError,
)


class PromptIn(BaseModel):
    id: str
    text: str


class SessionIn(BaseModel):
    session_id: str
    prompts: list[PromptIn]
    images_a: list[str]
    images_b: list[str]
    evaluators: list[str]
    seed: int = 0
    dimensions: list[str] = Field(default_factory=lambda: ["aesthetic", "alignment", "layout"])
    min_per_item: int = 3


class JudgmentIn(BaseModel):
    evaluator: str
    item_id: str
    dimension: str
    choice: str          # left | right | same


class GateIn(BaseModel):
    baseline: dict[str, dict]
    candidate: dict[str, dict]
    directions: dict[str, str] | None = None
    threshold: float = 0.70
    inclusive: bool = False


def _http_error(exc: SessionError) -> HTTPException:
    if isinstance(exc, UnknownSessionError):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, (DuplicateJudgmentError, SessionClosedError)):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, NotAssignedError):
        return HTTPException(status_code=403, detail=str(exc))
    return HTTPException(status_code=400, detail=str(exc))


def create_app(
    store: SessionStore,
    images_dir: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="roomforge gsb service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/v1/sessions")
    def post_session(body: SessionIn):
        try:
            session = store.create_session(
                session_id=body.session_id,
                prompts=[(p.id, p.text) for p in body.prompts],
                images_a=body.images_a,
                images_b=body.images_b,
                roster=body.evaluators,
                seed=body.seed,
                dimensions=body.dimensions,
                min_per_item=body.min_per_item,
            )
        except SessionError as exc:
            raise _http_error(exc)
        return {"session_id": session.session_id, "items": len(session.items)}

    @app.get("/v1/sessions/{session_id}/queue")
    def get_queue(
        session_id: str,
        evaluator: str = Query(...),
        dimension: str = Query(...),
        offset: int = Query(0, ge=0),
    ):
        try:
            assignment, judged, total = store.next_assignment(session_id, evaluator, dimension, offset)
            state = store.state(session_id)
        except SessionError as exc:
            raise _http_error(exc)
        if assignment is None:
            return {"done": True, "judged": judged, "total": total}
        item = next(i for i in state.session.items if i.item_id == assignment.item_id)
        left, right = (
            (item.image_a, item.image_b) if assignment.side == A_LEFT else (item.image_b, item.image_a)
        )
        prefix = "/images/" if images_dir else ""
        return {
            "done": False,
            "item_id": item.item_id,
            "prompt": item.prompt,
            "left_image_url": prefix + left,
            "right_image_url": prefix + right,
            "dimension": dimension,
            "position": judged + 1 + offset,
            "total": total,
        }

    @app.post("/v1/sessions/{session_id}/judgments")
    def post_judgment(session_id: str, body: JudgmentIn):
        try:
            judgment = store.record_judgment(
                session_id=session_id,
                evaluator=body.evaluator,
                item_id=body.item_id,
                dimension=body.dimension,
                raw_choice=body.choice,
            )
        except SessionError as exc:
            raise _http_error(exc)
        return {"accepted": True, "item_id": judgment.item_id}

    @app.get("/v1/sessions/{session_id}/summary")
    def get_summary(session_id: str, allow_partial: bool = False):
        try:
            return store.summary(session_id, allow_partial=allow_partial).to_dict()
        except SessionError as exc:
            raise _http_error(exc)

    @app.post("/v1/sessions/{session_id}/close")
    def post_close(session_id: str):
        try:
            store.close_session(session_id)
        except SessionError as exc:
            raise _http_error(exc)
        return {"closed": True}

    @app.post("/v1/gate")
    def post_gate(body: GateIn):
        try:
            decision = dual_gate(
                MetricReport.from_dict(body.baseline),
                MetricReport.from_dict(body.candidate),
                directions=body.directions,
                threshold=body.threshold,
                inclusive=body.inclusive,
            )
        except (GateError, KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return decision.to_dict()

    if images_dir:
        app.mount("/images", StaticFiles(directory=str(Path(images_dir))), name="images")
    if ui_dir:
        app.mount("/", StaticFiles(directory=str(Path(ui_dir)), html=True), name="ui")
    return app
