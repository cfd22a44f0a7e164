"""HTTP and WebSocket service for motion authoring tools.

Endpoints (all JSON, schema version in every payload):

  GET  /api/model                 kinematic description and joint order
  POST /api/convert               {"from", "to", "pose"} between spaces
  POST /api/interpolate           {"motion", "rateHz"} to sampled frames
  GET  /api/motions               stored motion summaries
  GET  /api/motions/{name}        exact stored document bytes, ETag header
  PUT  /api/motions/{name}        validate and persist, optional If-Match
  GET  /api/config                every parameter with bounds
  GET  /api/config/{key}          one parameter
  PUT  /api/config/{key}          {"value": ...}, 409 outside bounds
  WS   /ws/preview                playback frames with scrub and pause

Error shape: 400 malformed payload (field diagnostics in "errors"),
404 unknown motion or config key, 409 config bound violation,
412 stale If-Match on motion upload.
"""

from __future__ import annotations

import asyncio
import json
import os
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response, WebSocket, WebSocketDisconnect
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .. import __version__, default_model
from ..config import ConfigError, ConfigRegistry, default_registry
from ..kinematics import PoseDomainError, RobotModel
from ..motions import (
    Motion,
    MotionError,
    joint_order_hash,
    motion_from_json_bytes,
    total_duration,
)
from .store import MotionStore, etag_of
from .wire import WireError, convert_pose, sample_frame, sample_motion

API_VERSION = 1
DEFAULT_PORT = 8642
DATA_DIR_ENV = "HUMOTION_DATA_DIR"
EDITOR_DIR_ENV = "HUMOTION_EDITOR_DIR"

PREVIEW_RATE_KEY = "service.previewRate"


def resolve_data_dir(data_dir: str | Path | None = None) -> Path:
    if data_dir is not None:
        return Path(data_dir)
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".humotion"


class ConvertRequest(BaseModel):
    src: str = Field(alias="from")
    to: str
    pose: dict


class InterpolateRequest(BaseModel):
    motion: dict
    rateHz: float = Field(gt=0.0, le=1000.0)


class ConfigValue(BaseModel):
    value: Any


def create_app(
    data_dir: str | Path | None = None,
    model: RobotModel | None = None,
    registry: ConfigRegistry | None = None,
    editor_dir: str | Path | None = None,
) -> FastAPI:
    base = resolve_data_dir(data_dir)
    model = model if model is not None else default_model()
    if registry is None:
        registry = default_registry(path=base / "config.json")
        if registry.path.exists():
            registry.load()
    store = MotionStore(base / "motions")

    app = FastAPI(title="humotion service", version=__version__)
    app.state.model = model
    app.state.registry = registry
    app.state.store = store
    app.state.data_dir = base

    @app.exception_handler(RequestValidationError)
    async def _invalid_request(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(p) for p in e["loc"]), "message": e["msg"]}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": "invalid request", "errors": errors})

    @app.exception_handler(WireError)
    @app.exception_handler(PoseDomainError)
    @app.exception_handler(MotionError)
    async def _bad_payload(request: Request, exc: Exception):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    # model ----------------------------------------------------------------

    @app.get("/api/model")
    def get_model() -> dict:
        joints = [
            {
                "name": j.name,
                "parent": j.parent,
                "child": j.child,
                "axis": [float(x) for x in j.axis],
                "limits": [float(j.limits[0]), float(j.limits[1])],
                "index": j.index,
            }
            for j in model.joints
        ]
        links = [
            {
                "name": l.name,
                "parent": l.parent,
                "offset": [float(x) for x in l.offset],
                "mass": float(l.mass),
            }
            for l in model.links
        ]
        return {
            "apiVersion": API_VERSION,
            "name": model.name,
            "totalMass": float(model.total_mass),
            "jointOrder": list(model.joint_names),
            "jointOrderHash": joint_order_hash(),
            "joints": joints,
            "links": links,
            "dims": {k: float(v) for k, v in model.dims.items()},
        }

    # pose conversion --------------------------------------------------------

    @app.post("/api/convert")
    def post_convert(req: ConvertRequest) -> dict:
        pose, clamped = convert_pose(model, req.src, req.to, req.pose)
        return {"apiVersion": API_VERSION, "space": req.to, "pose": pose, "clamped": clamped}

    @app.post("/api/interpolate")
    def post_interpolate(req: InterpolateRequest) -> dict:
        motion = _motion_from_doc(req.motion)
        samples = sample_motion(model, motion, req.rateHz)
        return {
            "apiVersion": API_VERSION,
            "name": motion.name,
            "duration": total_duration(motion),
            "rateHz": req.rateHz,
            "samples": samples,
        }

    # motion library ---------------------------------------------------------

    @app.get("/api/motions")
    def list_motions() -> dict:
        entries = []
        for name in store.names():
            raw = store.read(name)
            motion = motion_from_json_bytes(raw)
            entries.append(
                {
                    "name": name,
                    "etag": etag_of(raw),
                    "precondition": motion.precondition,
                    "frames": len(motion.keyframes),
                    "duration": total_duration(motion),
                }
            )
        return {"apiVersion": API_VERSION, "motions": entries}

    @app.get("/api/motions/{name}")
    def get_motion(name: str) -> Response:
        try:
            raw = store.read(name)
        except KeyError:
            return JSONResponse(status_code=404, content={"detail": f"no motion named {name!r}"})
        return Response(content=raw, media_type="application/json", headers={"ETag": f'"{etag_of(raw)}"'})

    @app.put("/api/motions/{name}")
    async def put_motion(name: str, request: Request) -> Response:
        raw = await request.body()
        expected = request.headers.get("if-match")
        if expected is not None:
            expected = expected.strip().strip('"')
            try:
                current = store.etag(name)
            except KeyError:
                return JSONResponse(
                    status_code=412, content={"detail": "motion does not exist yet"}
                )
            if expected != current:
                return JSONResponse(
                    status_code=412,
                    content={"detail": "stored motion changed since it was loaded", "currentEtag": current},
                )
        store.write(name, raw)
        tag = etag_of(raw)
        return JSONResponse(
            status_code=200,
            content={"apiVersion": API_VERSION, "name": name, "etag": tag},
            headers={"ETag": f'"{tag}"'},
        )

    # configuration ------------------------------------------------------------

    @app.get("/api/config")
    def dump_config() -> dict:
        return {
            "apiVersion": API_VERSION,
            "entries": [registry.describe(k) for k in registry.keys()],
        }

    @app.get("/api/config/{key}")
    def get_config(key: str) -> Response:
        try:
            entry = registry.describe(key)
        except KeyError as e:
            return JSONResponse(status_code=404, content={"detail": str(e.args[0])})
        return JSONResponse(content={"apiVersion": API_VERSION, **entry})

    @app.put("/api/config/{key}")
    def put_config(key: str, body: ConfigValue) -> Response:
        try:
            changed = registry.set(key, body.value)
        except KeyError as e:
            return JSONResponse(status_code=404, content={"detail": str(e.args[0])})
        except TypeError as e:
            return JSONResponse(status_code=400, content={"detail": str(e)})
        except ConfigError as e:
            return JSONResponse(status_code=409, content={"detail": str(e)})
        if registry.path is not None:
            registry.save()
        return JSONResponse(
            content={
                "apiVersion": API_VERSION,
                "key": key,
                "value": registry.get(key),
                "changed": changed,
            }
        )

    # playback preview -----------------------------------------------------------

    @app.websocket("/ws/preview")
    async def ws_preview(ws: WebSocket):
        """Frame stream for the editor's 3D preview.

        Commands: {"cmd": "load", "name" | "motion", "rateHz"?},
        {"cmd": "play"}, {"cmd": "pause"}, {"cmd": "scrub", "t"}.
        While playing, one frame message is sent per period; scrub and
        pause answer with a single frame so the client stays in sync.
        """
        await ws.accept()
        motion: Motion | None = None
        duration = 0.0
        cursor = 0.0
        playing = False
        rate = float(registry.get(PREVIEW_RATE_KEY))

        def frame_message() -> dict:
            msg = sample_frame(model, motion, cursor)
            msg.update({"type": "frame", "playing": playing, "duration": duration})
            return msg

        try:
            while True:
                if playing:
                    try:
                        text = await asyncio.wait_for(ws.receive_text(), timeout=1.0 / rate)
                    except asyncio.TimeoutError:
                        cursor = min(cursor + 1.0 / rate, duration)
                        if cursor >= duration:
                            playing = False
                        await ws.send_json(frame_message())
                        if not playing:
                            await ws.send_json({"type": "done", "t": cursor})
                        continue
                else:
                    text = await ws.receive_text()

                try:
                    cmd = json.loads(text)
                    action = cmd.get("cmd")
                except (json.JSONDecodeError, AttributeError):
                    await ws.send_json({"type": "error", "detail": "commands must be JSON objects"})
                    continue

                if action == "load":
                    try:
                        if "name" in cmd:
                            motion = motion_from_json_bytes(store.read(str(cmd["name"])))
                        elif "motion" in cmd:
                            motion = _motion_from_doc(cmd["motion"])
                        else:
                            raise MotionError("load needs a name or a motion document")
                        if "rateHz" in cmd:
                            rate = float(cmd["rateHz"])
                            if not 1.0 <= rate <= 200.0:
                                raise MotionError("rateHz must be in [1, 200]")
                    except KeyError:
                        motion = None
                        await ws.send_json({"type": "error", "detail": "no such motion"})
                        continue
                    except (MotionError, TypeError, ValueError) as e:
                        motion = None
                        await ws.send_json({"type": "error", "detail": str(e)})
                        continue
                    duration = total_duration(motion)
                    cursor = 0.0
                    playing = False
                    await ws.send_json(
                        {
                            "type": "loaded",
                            "name": motion.name,
                            "duration": duration,
                            "frames": len(motion.keyframes),
                            "rateHz": rate,
                        }
                    )
                    await ws.send_json(frame_message())
                elif motion is None:
                    await ws.send_json({"type": "error", "detail": "load a motion first"})
                elif action == "play":
                    if cursor >= duration:
                        cursor = 0.0
                    playing = True
                    await ws.send_json(frame_message())
                elif action == "pause":
                    playing = False
                    await ws.send_json(frame_message())
                elif action == "scrub":
                    try:
                        target = float(cmd["t"])
                    except (KeyError, TypeError, ValueError):
                        await ws.send_json({"type": "error", "detail": "scrub needs a time"})
                        continue
                    cursor = min(max(target, 0.0), duration)
                    await ws.send_json(frame_message())
                else:
                    await ws.send_json({"type": "error", "detail": f"unknown command {action!r}"})
        except WebSocketDisconnect:
            return

    # editor statics ---------------------------------------------------------
    # Mounted last so every /api and /ws route keeps precedence. Serving the
    # browser editor from the same origin keeps its API calls CORS-free.
    editor = editor_dir if editor_dir is not None else os.environ.get(EDITOR_DIR_ENV)
    if editor:
        editor_path = Path(editor)
        if not editor_path.is_dir():
            raise ValueError(f"editor directory {editor_path} does not exist")
        app.mount("/", StaticFiles(directory=editor_path, html=True), name="editor")

    return app


def _motion_from_doc(doc: dict) -> Motion:
    return motion_from_json_bytes(json.dumps(doc).encode())


__all__ = [
    "API_VERSION",
    "DATA_DIR_ENV",
    "DEFAULT_PORT",
    "create_app",
    "resolve_data_dir",
]
