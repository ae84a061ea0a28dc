"""Grid meshes and their deformations over time: traveling sine waves and
a six-phase squash-and-stretch jump driven by keyframe interpolation.

Image coordinates throughout: x grows right, y grows down. A positive
`translate_y` in a pose moves the mesh up (decreasing raster y).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

REST_POSE_VALUES = (1.0, 1.0, 0.0)


@dataclass(frozen=True)
class Mesh:
    """Vertex positions in pixel coordinates, per-vertex uvs in [0,1]^2,
    and a triangle index list.
    """

    vertices: np.ndarray   # (V, 2) float64
    uvs: np.ndarray        # (V, 2) float64
    triangles: np.ndarray  # (T, 3) int64

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        u = np.asarray(self.uvs, dtype=np.float64)
        t = np.asarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 2:
            raise ValueError(f"vertices must be (V, 2), got {v.shape}")
        if u.shape != v.shape:
            raise ValueError("uvs must match vertex count")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError(f"triangles must be (T, 3), got {t.shape}")
        if t.size and (t.min() < 0 or t.max() >= v.shape[0]):
            raise ValueError("triangle indices out of range")
        if u.size and (u.min() < 0.0 or u.max() > 1.0):
            raise ValueError("uvs must lie in [0, 1]")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "uvs", u)
        object.__setattr__(self, "triangles", t)

    def with_vertices(self, vertices: np.ndarray) -> "Mesh":
        return Mesh(vertices, self.uvs, self.triangles)

    def bbox(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the vertex positions."""
        v = self.vertices
        return (
            float(v[:, 0].min()),
            float(v[:, 1].min()),
            float(v[:, 0].max()),
            float(v[:, 1].max()),
        )


@dataclass(frozen=True)
class WaveParams:
    amplitude: float = 8.0
    wave_count: float = 2.0
    speed: float = 1.0       # full periods per second
    phase0: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if self.wave_count <= 0:
            raise ValueError("wave_count must be > 0")


@dataclass(frozen=True)
class PoseParams:
    scale_x: float
    scale_y: float
    translate_y: float  # fraction of subject height, positive = upward

    def __post_init__(self):
        if self.scale_x <= 0 or self.scale_y <= 0:
            raise ValueError("scale factors must be > 0")


REST_POSE = PoseParams(*REST_POSE_VALUES)


@dataclass(frozen=True)
class JumpTimeline:
    keyframes: tuple  # of (time, PoseParams)

    def __post_init__(self):
        kfs = tuple((float(t), p) for t, p in self.keyframes)
        if len(kfs) < 2:
            raise ValueError("timeline needs at least two keyframes")
        times = [t for t, _ in kfs]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("keyframe times must be strictly increasing")
        if times[0] != 0.0 or times[-1] != 1.0:
            raise ValueError("timeline must start at 0 and end at 1")
        for idx in (0, -1):
            p = kfs[idx][1]
            if (p.scale_x, p.scale_y, p.translate_y) != REST_POSE_VALUES:
                raise ValueError("first and last keyframes must be the rest pose")
        object.__setattr__(self, "keyframes", kfs)


def default_jump_timeline() -> JumpTimeline:
    """Six-phase jump: anticipation squash, stretched flight to half the
    subject height, landing squash, a 2% second bounce, and back to rest.
    """
    return JumpTimeline(
        (
            (0.00, PoseParams(1.00, 1.00, 0.00)),
            (0.15, PoseParams(1.10, 0.90, 0.00)),
            (0.45, PoseParams(0.90, 1.10, 0.50)),
            (0.70, PoseParams(1.05, 0.95, 0.00)),
            (0.85, PoseParams(1.00, 1.00, 0.02)),
            (1.00, PoseParams(1.00, 1.00, 0.00)),
        )
    )


def make_grid_mesh(rect, nx: int, ny: int) -> Mesh:
    """Regular grid over rect=(x0, y0, width, height): (nx+1)*(ny+1)
    vertices, 2*nx*ny triangles with consistent positive-area winding,
    uv (i/nx, j/ny) at vertex (i, j).
    """
    x0, y0, width, height = (float(v) for v in rect)
    if nx < 1 or ny < 1:
        raise ValueError("grid density must be at least 1x1 cells")
    if width <= 0 or height <= 0:
        raise ValueError("rect width and height must be positive")
    verts = np.empty(((nx + 1) * (ny + 1), 2), dtype=np.float64)
    uvs = np.empty_like(verts)
    for j in range(ny + 1):
        for i in range(nx + 1):
            idx = j * (nx + 1) + i
            verts[idx] = (x0 + i * width / nx, y0 + j * height / ny)
            uvs[idx] = (i / nx, j / ny)
    tris = np.empty((2 * nx * ny, 3), dtype=np.int64)
    t = 0
    for j in range(ny):
        for i in range(nx):
            v00 = j * (nx + 1) + i
            v10 = v00 + 1
            v01 = v00 + nx + 1
            v11 = v01 + 1
            tris[t] = (v00, v10, v11)
            tris[t + 1] = (v00, v11, v01)
            t += 2
    return Mesh(verts, uvs, tris)


def horizontal_wave(rest: Mesh, params: WaveParams, t: float) -> Mesh:
    """Sine wave traveling vertically, displacing vertices horizontally:
    x' = x + A * sin(2*pi*waves*(y - y_min)/H + phase0 + 2*pi*speed*t).
    """
    v = rest.vertices
    y_min = v[:, 1].min()
    span = v[:, 1].max() - y_min
    if span <= 0:
        raise ValueError("rest mesh has zero height")
    phase = (
        2.0 * np.pi * params.wave_count * (v[:, 1] - y_min) / span
        + params.phase0
        + 2.0 * np.pi * params.speed * t
    )
    out = v.copy()
    out[:, 0] = v[:, 0] + params.amplitude * np.sin(phase)
    return rest.with_vertices(out)


def vertical_wave(rest: Mesh, params: WaveParams, t: float) -> Mesh:
    """Mirror of horizontal_wave: travels along x, displaces along y."""
    v = rest.vertices
    x_min = v[:, 0].min()
    span = v[:, 0].max() - x_min
    if span <= 0:
        raise ValueError("rest mesh has zero width")
    phase = (
        2.0 * np.pi * params.wave_count * (v[:, 0] - x_min) / span
        + params.phase0
        + 2.0 * np.pi * params.speed * t
    )
    out = v.copy()
    out[:, 1] = v[:, 1] + params.amplitude * np.sin(phase)
    return rest.with_vertices(out)


def jump_pose(timeline: JumpTimeline, t: float) -> PoseParams:
    """Component-wise linear interpolation between bracketing keyframes.

    Exact keyframe poses are returned at keyframe times (the lerp is
    evaluated as a*(1-u) + b*u, exact at both endpoints).
    """
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"t must lie in [0, 1], got {t}")
    kfs = timeline.keyframes
    for kt, pose in kfs:
        if t == kt:
            return pose
    hi = next(i for i, (kt, _) in enumerate(kfs) if kt > t)
    t0, p0 = kfs[hi - 1]
    t1, p1 = kfs[hi]
    u = (t - t0) / (t1 - t0)

    def lerp(a, b):
        return a * (1.0 - u) + b * u

    return PoseParams(
        lerp(p0.scale_x, p1.scale_x),
        lerp(p0.scale_y, p1.scale_y),
        lerp(p0.translate_y, p1.translate_y),
    )


def apply_pose(rest: Mesh, pose: PoseParams, anchor, subject_height: float) -> Mesh:
    """Scale about `anchor`, then translate up by translate_y * subject_height.

    Written as anchor*(1-s) + v*s so the rest pose is an exact identity.
    """
    if subject_height <= 0:
        raise ValueError("subject_height must be > 0")
    ax, ay = float(anchor[0]), float(anchor[1])
    v = rest.vertices
    out = np.empty_like(v)
    out[:, 0] = ax * (1.0 - pose.scale_x) + v[:, 0] * pose.scale_x
    out[:, 1] = ay * (1.0 - pose.scale_y) + v[:, 1] * pose.scale_y - (
        pose.translate_y * subject_height
    )
    return rest.with_vertices(out)


# ---------------------------------------------------------------------------
# Animation specs (the JSON contract shared by CLI, service and UI)
# ---------------------------------------------------------------------------

KINDS = ("hwave", "vwave", "jump")


@dataclass(frozen=True)
class AnimationSpec:
    kind: str
    amplitude: float = 8.0
    waves: float = 2.0
    speed: float = 1.0
    phase0: float = 0.0
    frames: int = 24
    duration: float = 2.0
    keyframes: JumpTimeline | None = field(default=None)

    def __post_init__(self):
        problems = validate_spec_obj(self.to_json_obj())
        if problems:
            raise ValueError("; ".join(problems))

    def to_json_obj(self) -> dict:
        obj = {
            "kind": self.kind,
            "amplitude": self.amplitude,
            "waves": self.waves,
            "speed": self.speed,
            "phase0": self.phase0,
            "frames": self.frames,
            "duration": self.duration,
        }
        if self.keyframes is not None:
            obj["keyframes"] = [
                {
                    "t": t,
                    "scale_x": p.scale_x,
                    "scale_y": p.scale_y,
                    "translate_y": p.translate_y,
                }
                for t, p in self.keyframes.keyframes
            ]
        return obj

    @classmethod
    def from_json_obj(cls, obj) -> "AnimationSpec":
        problems = validate_spec_obj(obj)
        if problems:
            raise ValueError("; ".join(problems))
        kfs = None
        if obj.get("keyframes") is not None:
            kfs = JumpTimeline(
                tuple(
                    (
                        kf["t"],
                        PoseParams(kf["scale_x"], kf["scale_y"], kf["translate_y"]),
                    )
                    for kf in obj["keyframes"]
                )
            )
        return cls(
            kind=obj["kind"],
            amplitude=float(obj.get("amplitude", 8.0)),
            waves=float(obj.get("waves", 2.0)),
            speed=float(obj.get("speed", 1.0)),
            phase0=float(obj.get("phase0", 0.0)),
            frames=int(obj.get("frames", 24)),
            duration=float(obj.get("duration", 2.0)),
            keyframes=kfs,
        )

    @classmethod
    def from_json(cls, text: str) -> "AnimationSpec":
        return cls.from_json_obj(json.loads(text))


def validate_spec_obj(obj) -> list[str]:
    """Every problem with an animation-spec JSON object, or [] if valid."""
    problems = []
    if not isinstance(obj, dict):
        return ["animation spec must be a JSON object"]
    kind = obj.get("kind")
    if kind not in KINDS:
        problems.append(f"kind must be one of {KINDS}, got {kind!r}")

    def num(name, default, cond, desc):
        val = obj.get(name, default)
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not cond(val):
            problems.append(f"{name} must be {desc}, got {val!r}")

    num("amplitude", 8.0, lambda v: v >= 0, "a number >= 0")
    num("waves", 2.0, lambda v: v > 0, "a number > 0")
    num("speed", 1.0, lambda v: True, "a number")
    num("phase0", 0.0, lambda v: True, "a number")
    num("frames", 24, lambda v: float(v).is_integer() and v >= 1, "an integer >= 1")
    num("duration", 2.0, lambda v: v > 0, "a number > 0")
    kfs = obj.get("keyframes")
    if kfs is not None:
        try:
            JumpTimeline(
                tuple(
                    (kf["t"], PoseParams(kf["scale_x"], kf["scale_y"], kf["translate_y"]))
                    for kf in kfs
                )
            )
        except (TypeError, KeyError, ValueError) as exc:
            problems.append(f"keyframes invalid: {exc}")
    return problems


def deform_at(rest: Mesh, spec: AnimationSpec, u: float) -> Mesh:
    """Deformed mesh at clip fraction u in [0, 1]."""
    if not (0.0 <= u <= 1.0):
        raise ValueError(f"clip fraction must lie in [0, 1], got {u}")
    if spec.kind == "hwave":
        params = WaveParams(spec.amplitude, spec.waves, spec.speed, spec.phase0)
        return horizontal_wave(rest, params, u * spec.duration)
    if spec.kind == "vwave":
        params = WaveParams(spec.amplitude, spec.waves, spec.speed, spec.phase0)
        return vertical_wave(rest, params, u * spec.duration)
    timeline = spec.keyframes if spec.keyframes is not None else default_jump_timeline()
    pose = jump_pose(timeline, u)
    x0, y0, x1, y1 = rest.bbox()
    anchor = ((x0 + x1) / 2.0, y1)  # ground-contact point of the subject
    return apply_pose(rest, pose, anchor, y1 - y0)


def sample_timeline(rest: Mesh, spec: AnimationSpec) -> list[Mesh]:
    """One deformed mesh per frame; frame i sits at u = i/(frames-1)
    (a single frame samples u = 0).
    """
    n = spec.frames
    if n < 1:
        raise ValueError("frame count must be >= 1")
    if n == 1:
        return [deform_at(rest, spec, 0.0)]
    return [deform_at(rest, spec, i / (n - 1)) for i in range(n)]
