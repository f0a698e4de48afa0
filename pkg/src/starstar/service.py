"""HTTP API over logs, snapshots, filters, checkpoints, and projection.

Snapshots are content-addressed and immutable: GETs are side-effect free
and byte-stable, filter POSTs mint new snapshot ids, and checkpoints map
names to saved snapshots per uploaded log.  State lives in memory; pass
``state_dir`` to persist uploaded logs as JSONL for restart recovery.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import os
import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .errors import EmptyPerspective, NotFound, StarStarError
from .filtering import DEFAULT_WEIGHT_THRESHOLD, CheckpointStore, FilterSpec, apply_filter
from .graphs import (
    ModelSnapshot,
    a2a_to_dict,
    build_model,
    e2e_neighborhood,
    e2e_to_dict,
)
from .ingest import parse_jsonl, parse_xoc, write_jsonl
from .model import DbEventLog
from .projection import ProjectionParams, case_notion, export_csv, export_xes, project, projection_summary

logger = logging.getLogger("starstar.service")

_XML_TYPES = ("application/xml", "text/xml")
_METRICS = ("count", "weight", "perf")


class SessionCatalog:
    """In-memory registry; mutations serialized through one lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self._logs: dict = {}
        self._snapshots: dict = {}
        self._checkpoints: dict = {}

    def add_log(self, log: DbEventLog) -> tuple:
        log_id = "l" + hashlib.sha256(write_jsonl(log)).hexdigest()[:12]
        snapshot = build_model(log)
        with self._lock:
            self._logs.setdefault(log_id, log)
            self._snapshots.setdefault(snapshot.snapshot_id, snapshot)
            self._checkpoints.setdefault(log_id, CheckpointStore())
        return log_id, snapshot

    def add_snapshot(self, snapshot: ModelSnapshot) -> None:
        with self._lock:
            self._snapshots.setdefault(snapshot.snapshot_id, snapshot)

    def log(self, log_id: str) -> DbEventLog:
        try:
            return self._logs[log_id]
        except KeyError:
            raise NotFound(f"unknown log id: {log_id!r}") from None

    def snapshot(self, snapshot_id: str) -> ModelSnapshot:
        try:
            return self._snapshots[snapshot_id]
        except KeyError:
            raise NotFound(f"unknown snapshot id: {snapshot_id!r}") from None

    def checkpoints(self, log_id: str) -> CheckpointStore:
        self.log(log_id)
        return self._checkpoints[log_id]


class CheckpointBody(BaseModel):
    name: str = Field(min_length=1)
    snapshotId: str = Field(min_length=1)


class ProjectBody(BaseModel):
    perspective: str = Field(alias="class", min_length=1)
    omega: float = Field(default=0.05, gt=0.0, le=1.0)
    window: int = Field(default=2, ge=0)
    format: str = Field(default="summary", pattern="^(xes|csv|summary)$")

    model_config = {"populate_by_name": True}


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _stable_json(payload: dict) -> Response:
    return Response(content=json.dumps(payload), media_type="application/json")


def create_app(
    state_dir: Optional[str] = None,
    project_timeout: float = 60.0,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="starstar service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    catalog = SessionCatalog()
    app.state.catalog = catalog
    executor = concurrent.futures.ThreadPoolExecutor(max_workers=4)

    if state_dir:
        os.makedirs(state_dir, exist_ok=True)
        for name in sorted(os.listdir(state_dir)):
            if name.endswith(".jsonl"):
                with open(os.path.join(state_dir, name), "rb") as fh:
                    try:
                        log_id, _ = catalog.add_log(parse_jsonl(fh.read()))
                        logger.info("recovered log %s from %s", log_id, name)
                    except StarStarError as exc:
                        logger.warning("skipping %s: %s", name, exc)

    @app.exception_handler(NotFound)
    async def _not_found(_request: Request, exc: NotFound):
        return _error(404, exc.code, str(exc))

    @app.exception_handler(EmptyPerspective)
    async def _empty_perspective(_request: Request, exc: EmptyPerspective):
        return _error(422, exc.code, str(exc))

    @app.exception_handler(StarStarError)
    async def _data_error(_request: Request, exc: StarStarError):
        return _error(400, exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_request: Request, exc: RequestValidationError):
        return _error(400, "BadRequest", str(exc.errors()[:1]))

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return _error(400, "BadRequest", str(exc))

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/logs", status_code=201)
    async def upload_log(request: Request):
        body = await request.body()
        content_type = request.headers.get("content-type", "").split(";")[0].strip().lower()
        if content_type in _XML_TYPES:
            log = parse_xoc(body)
        else:
            log = parse_jsonl(body)
        log_id, snapshot = catalog.add_log(log)
        if state_dir:
            path = os.path.join(state_dir, f"{log_id}.jsonl")
            if not os.path.exists(path):
                with open(path, "wb") as fh:
                    fh.write(write_jsonl(log))
        return JSONResponse(
            status_code=201,
            content={"logId": log_id, "snapshotId": snapshot.snapshot_id},
        )

    @app.get("/snapshots/{snapshot_id}/a2a")
    async def get_a2a(
        snapshot_id: str,
        metric: str = "count",
        minActivityCount: int = 0,
        minPathCount: int = 0,
        weightThreshold: float = DEFAULT_WEIGHT_THRESHOLD,
    ):
        if metric not in _METRICS:
            return _error(400, "BadRequest", f"unknown metric {metric!r}")
        if minActivityCount < 0 or minPathCount < 0 or not 0.0 <= weightThreshold <= 1.0:
            return _error(400, "BadRequest", "filter parameters out of range")
        snapshot = catalog.snapshot(snapshot_id)
        from .filtering import view

        shown = view(
            snapshot.a2a,
            min_activity_count=minActivityCount,
            min_path_count=minPathCount,
            weight_threshold=weightThreshold,
        )
        return _stable_json(a2a_to_dict(shown))

    @app.get("/snapshots/{snapshot_id}/e2e")
    async def get_e2e(snapshot_id: str, event: str, radius: int = 1):
        if radius < 0:
            return _error(400, "BadRequest", "radius must be >= 0")
        snapshot = catalog.snapshot(snapshot_id)
        subgraph = e2e_neighborhood(snapshot, event, radius)
        payload = {"event": event, "radius": radius}
        payload.update(e2e_to_dict(subgraph))
        return _stable_json(payload)

    @app.post("/snapshots/{snapshot_id}/filter", status_code=201)
    async def filter_snapshot(snapshot_id: str, request: Request):
        snapshot = catalog.snapshot(snapshot_id)
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(400, "BadRequest", "body must be JSON")
        spec = FilterSpec.from_dict(payload)
        if spec.kind != "edgeDrill":
            return _error(400, "BadRequest",
                          "only edgeDrill filters create snapshots; use a2a query params for view filters")
        result = apply_filter(snapshot, spec)
        catalog.add_snapshot(result)
        return JSONResponse(status_code=201, content={"snapshotId": result.snapshot_id})

    @app.post("/logs/{log_id}/checkpoints", status_code=204)
    async def save_checkpoint(log_id: str, body: CheckpointBody):
        store = catalog.checkpoints(log_id)
        snapshot = catalog.snapshot(body.snapshotId)
        store.save(body.name, snapshot)
        return Response(status_code=204)

    @app.post("/logs/{log_id}/checkpoints/{name}/reset")
    async def reset_checkpoint(log_id: str, name: str):
        store = catalog.checkpoints(log_id)
        snapshot = store.reset(name)
        return {"snapshotId": snapshot.snapshot_id}

    @app.post("/snapshots/{snapshot_id}/project")
    async def project_snapshot(snapshot_id: str, body: ProjectBody):
        snapshot = catalog.snapshot(snapshot_id)
        params = ProjectionParams(body.perspective, body.omega, body.window)

        def run():
            cases = case_notion(snapshot.log, params)
            return project(snapshot.log, cases)

        future = executor.submit(run)
        try:
            clog = future.result(timeout=project_timeout)
        except concurrent.futures.TimeoutError:
            future.cancel()
            return _error(422, "Timeout",
                          f"projection exceeded {project_timeout:.0f}s; raise omega or lower the window")
        except EmptyPerspective as exc:
            return _error(422, exc.code, str(exc))

        if body.format == "xes":
            return Response(content=export_xes(clog), media_type="application/xml")
        if body.format == "csv":
            return Response(content=export_csv(clog), media_type="text/csv")
        return _stable_json(projection_summary(clog))

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
