"""HTTP service exposing the synthesis pipeline as a session API.

A session holds one target boundary plus the evolving layout graph.
Clients create a session, browse retrieved candidates, transfer one,
apply graph edits, and regenerate the plan after each step.  Sessions
live in process memory; each one carries its own lock so concurrent
requests against the same session serialize while separate sessions
proceed independently.
"""

from __future__ import annotations

import base64
import io
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import pipeline, transfer, vectorize
from .corpus import FloorplanRecord, load_corpus
from .geometry import Boundary, BoundaryError, rasterize_boundary
from .layout import GraphInvariantError, LayoutGraph
from .retrieval import Constraints, ConstraintError, filter as filter_records, rank_with_distances
from .solver import SolverConfig, SolverError
from .transfer import GraphEditError, InfeasibleBoundaryError
from .vectorize import VectorizeError

API_PREFIX = "/api/v1"
THUMBNAIL_RES = 32


class ServiceError(Exception):
    """API error carrying an HTTP status and a machine-readable code."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class Session:
    id: str
    boundary: Boundary
    graph: LayoutGraph | None = None
    priors: list = field(default_factory=list)
    template_id: str | None = None
    result: "pipeline.GenerateResult | None" = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _thumbnail(record: FloorplanRecord) -> list[str]:
    """Coarse text raster of a record's ground-truth layout.

    Each row is a string of THUMBNAIL_RES characters: '.' outside,
    ' ' uncovered interior, letters a.. for rooms in id order.
    """
    res = record.boundary.resolution
    ras = rasterize_boundary(record.boundary)
    grid = np.full((res, res), ".", dtype="<U1")
    grid[ras.inside_mask] = " "
    for i, box in enumerate(sorted(record.gt_boxes, key=lambda b: -b.area)):
        r0, r1 = int(max(box.y0, 0)), int(min(box.y1, res))
        c0, c1 = int(max(box.x0, 0)), int(min(box.x1, res))
        ch = chr(ord("a") + (box.room_id % 26))
        block = grid[r0:r1, c0:c1]
        block[block != "."] = ch
    step = res // THUMBNAIL_RES
    small = grid[::step, ::step][:THUMBNAIL_RES, :THUMBNAIL_RES]
    return ["".join(row) for row in small]


def _parse_boundary(payload: dict) -> Boundary:
    if not isinstance(payload, dict) or "boundary" not in payload:
        raise ServiceError(422, "missing_field", "request body must contain 'boundary'")
    try:
        return Boundary.from_dict(payload["boundary"])
    except (BoundaryError, KeyError, TypeError, ValueError) as exc:
        raise ServiceError(422, "invalid_boundary", str(exc)) from exc


def _floorplan_payload(session: Session) -> dict:
    from .evaluate import partition_stats

    result = session.result
    vf = result.floorplan
    partition = partition_stats(vf)
    return {
        "floorplan": vf.to_dict(),
        "svg": vectorize.export(vf, "svg"),
        "boxes": [b.to_dict() for b in result.boxes],
        "loss_trace": [lb.to_dict() for lb in result.trace],
        "final_loss": result.final_loss.to_dict(),
        "timings": result.timings,
        "stats": {
            "n_rooms": len(vf.rooms),
            "n_doors": len(vf.doors),
            "n_windows": len(vf.windows),
            "unsatisfied_adjacencies": [list(e) for e in vf.unsatisfied_adjacencies],
            "coverage": partition["coverage"],
            "overlap_pixels": partition["overlap_pixels"],
            "outside_pixels": partition["outside_pixels"],
        },
    }


def create_app(corpus: list[FloorplanRecord] | None = None, corpus_path: str | None = None) -> FastAPI:
    if corpus is None:
        if corpus_path is None:
            raise ValueError("either corpus or corpus_path is required")
        corpus = load_corpus(corpus_path)
    records = {r.id: r for r in corpus}
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    app = FastAPI(title="floorsynth", docs_url=None, redoc_url=None)

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(Exception)
    async def _unhandled(_req: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal", "message": str(exc)}},
        )

    def get_session(session_id: str) -> Session:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "unknown_session", f"no session {session_id}")
        return session

    async def read_json(request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception as exc:
            raise ServiceError(422, "invalid_json", "request body is not valid JSON") from exc
        if not isinstance(payload, dict):
            raise ServiceError(422, "invalid_json", "request body must be a JSON object")
        return payload

    @app.get(API_PREFIX + "/health")
    async def health():
        return {"status": "ok", "corpus_size": len(records)}

    @app.post(API_PREFIX + "/sessions", status_code=201)
    async def create_session(request: Request):
        payload = await read_json(request)
        boundary = _parse_boundary(payload)
        session = Session(id=uuid.uuid4().hex, boundary=boundary)
        with sessions_lock:
            sessions[session.id] = session
        return {"session_id": session.id, "boundary": boundary.to_dict()}

    @app.get(API_PREFIX + "/sessions/{session_id}")
    async def get_session_state(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return {
                "session_id": session.id,
                "boundary": session.boundary.to_dict(),
                "template_id": session.template_id,
                "graph": session.graph.to_dict() if session.graph else None,
                "has_result": session.result is not None,
            }

    @app.post(API_PREFIX + "/sessions/{session_id}/retrieve")
    async def retrieve_candidates(session_id: str, request: Request):
        session = get_session(session_id)
        payload = await read_json(request)
        try:
            constraints = Constraints.from_dict(payload.get("constraints", {}))
        except (ConstraintError, TypeError, ValueError, KeyError) as exc:
            raise ServiceError(422, "invalid_constraints", str(exc)) from exc
        k = payload.get("k", 10)
        if not isinstance(k, int) or k < 1 or k > 100:
            raise ServiceError(422, "invalid_k", "k must be an integer in [1, 100]")
        with session.lock:
            ranked = rank_with_distances(
                filter_records(list(records.values()), constraints), session.boundary
            )[:k]
            return {
                "candidates": [
                    {
                        "record_id": rec.id,
                        "distance": dist,
                        "graph": rec.graph.to_dict(),
                        "thumbnail": _thumbnail(rec),
                    }
                    for rec, dist in ranked
                ]
            }

    @app.post(API_PREFIX + "/sessions/{session_id}/transfer")
    async def transfer_template(session_id: str, request: Request):
        session = get_session(session_id)
        payload = await read_json(request)
        record_id = payload.get("record_id")
        record = records.get(record_id)
        if record is None:
            raise ServiceError(404, "unknown_record", f"no corpus record {record_id!r}")
        with session.lock:
            try:
                graph, priors, k = pipeline.transfer_priors(record, session.boundary)
            except InfeasibleBoundaryError as exc:
                raise ServiceError(409, "infeasible_boundary", str(exc)) from exc
            session.graph = graph
            session.priors = priors
            session.template_id = record.id
            session.result = None
            return {
                "graph": graph.to_dict(),
                "rotation": k,
                "priors": [b.to_dict() for b in priors],
            }

    @app.post(API_PREFIX + "/sessions/{session_id}/edit")
    async def edit_graph(session_id: str, request: Request):
        session = get_session(session_id)
        payload = await read_json(request)
        with session.lock:
            if session.graph is None:
                raise ServiceError(409, "no_graph", "transfer a template before editing")
            try:
                edit = transfer.edit_from_dict(payload)
                session.graph = transfer.apply_edit(session.graph, edit)
            except (GraphEditError, GraphInvariantError) as exc:
                raise ServiceError(422, "invalid_edit", str(exc)) from exc
            session.result = None
            return {"graph": session.graph.to_dict()}

    @app.post(API_PREFIX + "/sessions/{session_id}/generate")
    async def generate_plan(session_id: str, request: Request):
        session = get_session(session_id)
        body = await request.body()
        payload = await read_json(request) if body else {}
        cfg = SolverConfig()
        if "max_iters" in payload:
            iters = payload["max_iters"]
            if not isinstance(iters, int) or not (1 <= iters <= 2000):
                raise ServiceError(422, "invalid_config", "max_iters must be in [1, 2000]")
            cfg = SolverConfig(max_iters=iters)
        with session.lock:
            if session.graph is None:
                raise ServiceError(409, "no_graph", "transfer a template before generating")
            try:
                session.result = pipeline.generate(
                    session.graph, session.boundary, priors=list(session.priors), cfg=cfg
                )
            except (SolverError, VectorizeError) as exc:
                raise ServiceError(409, "generation_failed", str(exc)) from exc
            return _floorplan_payload(session)

    @app.get(API_PREFIX + "/sessions/{session_id}/export")
    async def export_plan(session_id: str, format: str = "json"):
        session = get_session(session_id)
        with session.lock:
            if session.result is None:
                raise ServiceError(409, "no_result", "generate a plan before exporting")
            if format == "json":
                return Response(
                    content=vectorize.export(session.result.floorplan, "json"),
                    media_type="application/json",
                )
            if format == "svg":
                return Response(
                    content=vectorize.export(session.result.floorplan, "svg"),
                    media_type="image/svg+xml",
                )
        raise ServiceError(422, "invalid_format", f"unsupported export format {format!r}")

    @app.delete(API_PREFIX + "/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str):
        with sessions_lock:
            if session_id not in sessions:
                raise ServiceError(404, "unknown_session", f"no session {session_id}")
            del sessions[session_id]
        return Response(status_code=204)

    return app
