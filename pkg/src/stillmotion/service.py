"""HTTP session API for the interactive loop: upload an image, refine the
subject mask click by click, preview the inpainted plate, scrub animation
frames, export a GIF.

All pixel work delegates to the same pipeline helpers the CLI uses, so
service responses are bit-identical to CLI artifacts for equal inputs.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .errors import ClickConflictError, ImageDecodeError
from .imagecore import ClickSet, ImageBuffer, Mask, decode_image, encode_png
from .inpaint import InpaintConfig
from .meshanim import AnimationSpec, deform_at, sample_timeline, validate_spec_obj
from .pipeline import SegmentationParams, compute_mask, compute_plate, mask_to_image
from .render import build_scene, composite_frame, encode_gif

DEFAULT_TTL_SECS = 1800
DEFAULT_MAX_IMAGE_BYTES = 16 * 1024 * 1024


@dataclass
class ServiceSettings:
    session_ttl_secs: float = DEFAULT_TTL_SECS
    max_image_bytes: int = DEFAULT_MAX_IMAGE_BYTES
    persist_dir: Path | None = None
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    inpaint: InpaintConfig = field(default_factory=InpaintConfig)
    sampling: str = "bilinear"

    @classmethod
    def from_env(cls) -> "ServiceSettings":
        ttl = float(os.environ.get("SESSION_TTL_SECS", DEFAULT_TTL_SECS))
        cap = int(os.environ.get("MAX_IMAGE_BYTES", DEFAULT_MAX_IMAGE_BYTES))
        persist = os.environ.get("STILLMOTION_SESSION_DIR")
        return cls(
            session_ttl_secs=ttl,
            max_image_bytes=cap,
            persist_dir=Path(persist) if persist else None,
        )


@dataclass
class Session:
    id: str
    image: ImageBuffer
    clicks: ClickSet | None = None
    mask: Mask | None = None
    plate: ImageBuffer | None = None
    last_spec: AnimationSpec | None = None
    created_at: float = field(default_factory=time.monotonic)
    touched_at: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory sessions with idle-TTL expiry and optional on-disk
    persistence of the inputs (image + clicks) for crash recovery.
    """

    def __init__(self, settings: ServiceSettings):
        self._settings = settings
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        if settings.persist_dir is not None:
            settings.persist_dir.mkdir(parents=True, exist_ok=True)
            self._recover()

    def create(self, image: ImageBuffer) -> Session:
        session = Session(id=uuid.uuid4().hex, image=image)
        with self._lock:
            self._sessions[session.id] = session
        self._persist_image(session)
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            self._evict_expired()
            session = self._sessions.get(session_id)
            if session is not None:
                session.touched_at = time.monotonic()
            return session

    def delete(self, session_id: str) -> bool:
        with self._lock:
            gone = self._sessions.pop(session_id, None)
        if gone is not None and self._settings.persist_dir is not None:
            for name in ("image.png", "clicks.json"):
                p = self._settings.persist_dir / gone.id / name
                p.unlink(missing_ok=True)
        return gone is not None

    def _evict_expired(self):
        ttl = self._settings.session_ttl_secs
        now = time.monotonic()
        dead = [sid for sid, s in self._sessions.items() if now - s.touched_at > ttl]
        for sid in dead:
            del self._sessions[sid]

    def _persist_image(self, session: Session):
        root = self._settings.persist_dir
        if root is None:
            return
        d = root / session.id
        d.mkdir(parents=True, exist_ok=True)
        (d / "image.png").write_bytes(encode_png(session.image))

    def persist_clicks(self, session: Session):
        root = self._settings.persist_dir
        if root is None or session.clicks is None:
            return
        d = root / session.id
        d.mkdir(parents=True, exist_ok=True)
        (d / "clicks.json").write_text(json.dumps(session.clicks.to_json_obj()))

    def _recover(self):
        for d in sorted(self._settings.persist_dir.iterdir()):
            img_path = d / "image.png"
            if not d.is_dir() or not img_path.exists():
                continue
            try:
                image = decode_image(img_path.read_bytes(), name=str(img_path))
            except ImageDecodeError:
                continue
            session = Session(id=d.name, image=image)
            clicks_path = d / "clicks.json"
            if clicks_path.exists():
                try:
                    session.clicks = ClickSet.from_json_obj(
                        json.loads(clicks_path.read_text())
                    )
                except (json.JSONDecodeError, ValueError):
                    session.clicks = None
            self._sessions[session.id] = session


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings.from_env()
    store = SessionStore(settings)
    app = FastAPI(title="stillmotion", version="0.1.0")
    app.state.settings = settings
    app.state.store = store

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.body()
        if len(body) > settings.max_image_bytes:
            return _error(
                413, "image_too_large",
                f"image exceeds the {settings.max_image_bytes} byte cap",
            )
        try:
            image = decode_image(body)
        except ImageDecodeError as exc:
            return _error(400, "undecodable_image", str(exc))
        session = store.create(image)
        return {"id": session.id}

    @app.put("/sessions/{session_id}/clicks")
    async def update_clicks(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        try:
            clicks = ClickSet.from_json_obj(json.loads(await request.body()))
        except (json.JSONDecodeError, ValueError) as exc:
            return _error(422, "malformed_clicks", str(exc))
        with session.lock:
            try:
                clicks.validate_bounds(session.image.width, session.image.height)
                if not clicks.positives:
                    return _error(
                        422, "no_positive_click", "at least one positive click is required"
                    )
                mask = compute_mask(session.image, clicks, settings.segmentation)
            except ClickConflictError as exc:
                return _error(422, "clicks_conflict", str(exc))
            except ValueError as exc:
                return _error(422, "malformed_clicks", str(exc))
            session.clicks = clicks
            session.mask = mask
            session.plate = None  # cached plate belongs to the old mask
            store.persist_clicks(session)
            png = encode_png(mask_to_image(mask))
        return Response(content=png, media_type="image/png")

    def _ensure_plate(session: Session) -> ImageBuffer:
        if session.plate is None:
            outcome = compute_plate(session.image, session.mask, settings.inpaint)
            session.plate = outcome.image
        return session.plate

    @app.get("/sessions/{session_id}/inpaint")
    def preview_inpaint(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with session.lock:
            if session.mask is None:
                return _error(409, "no_mask", "place at least one click first")
            plate = _ensure_plate(session)
            png = encode_png(plate)
        return Response(content=png, media_type="image/png")

    @app.post("/sessions/{session_id}/animation")
    async def render_animation(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        try:
            spec_obj = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return _error(422, "invalid_spec", f"bad JSON: {exc}")
        problems = validate_spec_obj(spec_obj)
        if problems:
            return _error(422, "invalid_spec", "; ".join(problems))
        spec = AnimationSpec.from_json_obj(spec_obj)
        with session.lock:
            if session.mask is None:
                return _error(409, "no_mask", "place at least one click first")
            plate = _ensure_plate(session)
            session.last_spec = spec
            scene = build_scene(session.image, session.mask, plate)
            meshes = sample_timeline(scene.subject_rest_mesh, spec)
            frames = [
                composite_frame(scene, m, index=i, sampling=settings.sampling)
                for i, m in enumerate(meshes)
            ]
            delay = max(int(round(100.0 * spec.duration / spec.frames)), 1)
            data = encode_gif(frames, delay)
        return Response(content=data, media_type="image/gif")

    @app.get("/sessions/{session_id}/frame")
    def preview_frame(session_id: str, t: float, spec: str | None = None):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        if not (0.0 <= t <= 1.0):
            return _error(422, "invalid_t", f"t must lie in [0, 1], got {t}")
        if spec is not None:
            try:
                spec_obj = json.loads(spec)
            except json.JSONDecodeError as exc:
                return _error(422, "invalid_spec", f"bad JSON: {exc}")
            problems = validate_spec_obj(spec_obj)
            if problems:
                return _error(422, "invalid_spec", "; ".join(problems))
            anim = AnimationSpec.from_json_obj(spec_obj)
        else:
            anim = None
        with session.lock:
            if session.mask is None:
                return _error(409, "no_mask", "place at least one click first")
            if anim is None:
                anim = session.last_spec
            if anim is None:
                return _error(422, "invalid_spec", "no animation spec given or stored")
            session.last_spec = anim
            plate = _ensure_plate(session)
            scene = build_scene(session.image, session.mask, plate)
            mesh = deform_at(scene.subject_rest_mesh, anim, t)
            frame = composite_frame(scene, mesh, sampling=settings.sampling)
            png = encode_png(frame.image)
        return Response(content=png, media_type="image/png")

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        if not store.delete(session_id):
            return _error(404, "unknown_session", f"no session {session_id}")
        return Response(status_code=204)

    return app


def serve(host: str = "127.0.0.1", port: int | None = None, settings=None):
    """Run the API with uvicorn. PORT env is honored unless `port` is given."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("PORT", 8000))
    uvicorn.run(create_app(settings), host=host, port=port, log_level="info")
