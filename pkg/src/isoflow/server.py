"""HTTP service for the interactive viewer.

Sessions are in-memory. Mutating endpoints (isosurfaces, candidates) are
serialized per session and replace lists wholesale, so reads and select
requests can run lock-free against consistent snapshots.

Routes:
    POST   /sessions
    POST   /sessions/{id}/isosurfaces
    POST   /sessions/{id}/candidates
    POST   /sessions/{id}/select
    GET    /sessions/{id}/geometry?what=meshes|streamlines|critical_points|selection
    GET    /sessions/{id}/criticalpoints
    DELETE /sessions/{id}
"""
from __future__ import annotations

import base64
import itertools
import tempfile
import threading
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import isosurface, scoring, selection, topology, tracing, volume

DEFAULT_PORT = 7870


class ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str = ""):
        super().__init__(detail or error)
        self.status = status
        self.error = error
        self.detail = detail


@dataclass
class Session:
    id: str
    grid: volume.VolumeGrid
    scalar_field: str
    vector_field: str
    cps: list = dc_field(default_factory=list)
    meshes: list = dc_field(default_factory=list)
    candidates: list = dc_field(default_factory=list)
    last_selection: selection.SelectionResult | None = None
    lock: threading.Lock = dc_field(default_factory=threading.Lock)


class CreateSessionRequest(BaseModel):
    path: str | None = None
    data_b64: str | None = None
    scalar_field: str
    vector_field: str


class IsosurfaceRequest(BaseModel):
    isovalue: float
    opacity: float = 0.4


class CandidatesRequest(BaseModel):
    uniform_seed_count: int = 200
    seeds_per_cp: int = 8
    rng_seed: int = 0
    step_size: float | None = None
    max_steps: int | None = None
    min_points: int | None = None


class CameraModel(BaseModel):
    eye: list[float]
    target: list[float]
    up: list[float] = [0.0, 1.0, 0.0]
    fov_y: float = 0.9
    width: int = 800
    height: int = 600
    near: float = 1e-3
    far: float = 1e4


class SelectRequest(BaseModel):
    camera: CameraModel
    k: int = 10
    guarantee_critical: bool = False
    density_control: bool = False
    cell_stride: int = 1
    mode: str = scoring.MODE_PER_SEGMENT


def create_app() -> FastAPI:
    app = FastAPI(title="isoflow")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    sessions: dict[str, Session] = {}
    counter = itertools.count(1)
    registry_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": exc.error, "detail": exc.detail})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "invalid request", "detail": str(exc)})

    def get_session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise ApiError(404, "unknown session", sid)
        return s

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        try:
            if req.path is not None:
                grid = volume.load_svf(req.path)
            elif req.data_b64 is not None:
                with tempfile.NamedTemporaryFile(suffix=".svf") as tf:
                    tf.write(base64.b64decode(req.data_b64))
                    tf.flush()
                    grid = volume.load_svf(tf.name)
            else:
                raise ApiError(400, "no dataset", "provide path or data_b64")
        except (volume.VolumeError, OSError, ValueError) as e:
            raise ApiError(400, "dataset parse failure", str(e))
        try:
            grid.scalar_field(req.scalar_field)
            grid.vector_field(req.vector_field)
        except volume.UnknownFieldError as e:
            raise ApiError(400, "unknown field", str(e))

        cps = topology.extract_all(grid, req.scalar_field, req.vector_field)
        with registry_lock:
            sid = f"s{next(counter)}"
            sessions[sid] = Session(sid, grid, req.scalar_field, req.vector_field,
                                    cps=cps)
        kinds = [cp.kind for cp in cps]
        return {
            "session_id": sid,
            "dims": list(grid.dims),
            "origin": list(grid.origin),
            "spacing": list(grid.spacing),
            "field_names": [f.name for f in grid.fields],
            "cp_counts": {k: kinds.count(k) for k in
                          (topology.KIND_SCALAR_MAX, topology.KIND_SCALAR_MIN,
                           topology.KIND_VECTOR_ZERO)},
        }

    @app.post("/sessions/{sid}/isosurfaces")
    def add_isosurface(sid: str, req: IsosurfaceRequest):
        s = get_session(sid)
        if not 0.0 <= req.opacity <= 1.0:
            raise ApiError(400, "opacity out of range", str(req.opacity))
        with s.lock:
            mesh = isosurface.polygonize(s.grid, s.scalar_field, req.isovalue,
                                         req.opacity, surface_index=len(s.meshes))
            s.meshes = s.meshes + [mesh]
        return {"surface_index": mesh.surface_index,
                "triangle_count": int(len(mesh.triangles))}

    @app.post("/sessions/{sid}/candidates")
    def build_candidates(sid: str, req: CandidatesRequest):
        s = get_session(sid)
        over = {"uniform_seed_count": req.uniform_seed_count,
                "seeds_per_cp": req.seeds_per_cp, "rng_seed": req.rng_seed}
        for key in ("step_size", "max_steps", "min_points"):
            val = getattr(req, key)
            if val is not None:
                over[key] = val
        cfg = tracing.TraceConfig.for_grid(s.grid, s.vector_field, **over)
        vec_cps = [cp for cp in s.cps if cp.kind == topology.KIND_VECTOR_ZERO]
        with s.lock:
            cands = tracing.build_candidates(s.grid, s.vector_field, vec_cps, cfg)
            s.candidates = cands
            s.last_selection = None
        return {
            "candidate_count": len(cands),
            "critical_candidate_count": sum(1 for c in cands
                                            if c.from_critical is not None),
        }

    @app.post("/sessions/{sid}/select")
    def select(sid: str, req: SelectRequest):
        s = get_session(sid)
        if not s.candidates:
            raise ApiError(409, "no candidates", "POST candidates first")
        try:
            cam = scoring.Camera.from_dict(req.camera.model_dump())
        except scoring.CameraError as e:
            raise ApiError(400, "invalid camera", str(e))
        try:
            cfg = selection.SelectionConfig(
                k=req.k, guarantee_critical=req.guarantee_critical,
                density_control=req.density_control,
                cell_stride=req.cell_stride, mode=req.mode)
            scores = scoring.score_all(cam, s.candidates, s.meshes, cfg.mode)
        except ValueError as e:
            raise ApiError(400, "invalid selection config", str(e))
        result = selection.select_streamlines(s.candidates, scores, s.grid, cfg,
                                              camera=cam)
        s.last_selection = result
        return result.to_dict()

    @app.get("/sessions/{sid}/geometry")
    def geometry(sid: str, what: str):
        s = get_session(sid)
        if what == "meshes":
            return [m.to_dict() for m in s.meshes]
        if what == "streamlines":
            return tracing.candidates_to_json(s.candidates)
        if what == "critical_points":
            return [cp.to_dict() for cp in s.cps]
        if what == "selection":
            return s.last_selection.to_dict() if s.last_selection else None
        raise ApiError(400, "unknown geometry kind", what)

    @app.get("/sessions/{sid}/criticalpoints")
    def critical_points(sid: str):
        s = get_session(sid)
        scalar_cps = [cp for cp in s.cps
                      if cp.kind in (topology.KIND_SCALAR_MAX,
                                     topology.KIND_SCALAR_MIN)]
        suggestions = isosurface.suggest_isovalues(s.grid, scalar_cps)
        return {
            "critical_points": [cp.to_dict() for cp in s.cps],
            "isovalue_suggestions": [
                {"critical_point_id": sug.critical_point_id,
                 "suggested_isovalue": sug.suggested_isovalue,
                 "offset": sug.offset}
                for sug in suggestions
            ],
        }

    @app.delete("/sessions/{sid}")
    def delete_session(sid: str):
        get_session(sid)
        with registry_lock:
            sessions.pop(sid, None)
        return {"deleted": sid}

    return app
