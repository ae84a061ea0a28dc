"""End-to-end orchestration: image + clicks -> mask -> background plate ->
animated frames -> GIF/PNG outputs.

The stage helpers here (compute_mask, compute_plate, render_clip) are the
single code path behind both the CLI and the HTTP service, which keeps
their artifacts bit-identical for identical inputs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ConfigError, StageError
from .imagecore import ClickSet, ImageBuffer, Mask, load_image, save_image
from .inpaint import InpaintConfig, InpaintOutcome, make_background
from .meshanim import AnimationSpec, sample_timeline, validate_spec_obj
from .render import (
    DEFAULT_BACKGROUND_CELLS,
    DEFAULT_SUBJECT_CELLS,
    Frame,
    SAMPLING_MODES,
    build_scene,
    composite_frame,
    encode_gif,
    write_frame_sequence,
)
from .segmentation import (
    DEFAULT_CLOSING_RADIUS,
    DEFAULT_K,
    DEFAULT_POLICY,
    DEFAULT_WEIGHTS,
    build_feature_field,
    extract_subject,
    kmeans,
    refine_mask,
)

STAGES = ("segment", "inpaint", "animate")

MASK_ARTIFACT = "mask.png"
PLATE_ARTIFACT = "inpainted.png"


@dataclass(frozen=True)
class SegmentationParams:
    k: int = DEFAULT_K
    seed: int = 0
    weights: tuple = DEFAULT_WEIGHTS
    closing_radius: float = DEFAULT_CLOSING_RADIUS
    policy: str = DEFAULT_POLICY
    merge_threshold: float | None = None


@dataclass(frozen=True)
class PipelineConfig:
    input_path: Path
    clicks: ClickSet
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    inpaint: InpaintConfig = field(default_factory=InpaintConfig)
    animation: AnimationSpec = field(default_factory=lambda: AnimationSpec(kind="jump"))
    gif_path: Path | None = None
    frames_dir: Path | None = None
    delay_cs: int | None = None
    sampling: str = "bilinear"
    subject_cells: tuple[int, int] = DEFAULT_SUBJECT_CELLS
    background_cells: tuple[int, int] = DEFAULT_BACKGROUND_CELLS
    workdir: Path = Path("stillmotion-artifacts")

    def resolved_delay_cs(self) -> int:
        if self.delay_cs is not None:
            return self.delay_cs
        return max(int(round(100.0 * self.animation.duration / self.animation.frames)), 1)


# ---------------------------------------------------------------------------
# Stage computations (shared with the service)
# ---------------------------------------------------------------------------

def compute_mask(image: ImageBuffer, clicks: ClickSet, params: SegmentationParams) -> Mask:
    clicks.validate_bounds(image.width, image.height)
    features = build_feature_field(image, clicks, params.weights)
    model = kmeans(features, params.k, params.seed, params.merge_threshold)
    raw = extract_subject(model, clicks)
    return refine_mask(raw, params.closing_radius, params.policy, clicks)


def compute_plate(image: ImageBuffer, mask: Mask, config: InpaintConfig) -> InpaintOutcome:
    return make_background(image, mask, config)


def render_clip(
    image: ImageBuffer,
    mask: Mask,
    plate: ImageBuffer,
    spec: AnimationSpec,
    sampling: str = "bilinear",
    subject_cells: tuple[int, int] = DEFAULT_SUBJECT_CELLS,
    background_cells: tuple[int, int] = DEFAULT_BACKGROUND_CELLS,
) -> list[Frame]:
    scene = build_scene(image, mask, plate, subject_cells, background_cells)
    meshes = sample_timeline(scene.subject_rest_mesh, spec)
    return [
        composite_frame(scene, mesh, index=i, sampling=sampling)
        for i, mesh in enumerate(meshes)
    ]


def mask_to_image(mask: Mask) -> ImageBuffer:
    """White-on-black visualization, the on-disk mask artifact format."""
    v = np.where(mask.bits, 255, 0).astype(np.uint8)
    out = np.empty((mask.height, mask.width, 4), dtype=np.uint8)
    out[:, :, 0] = v
    out[:, :, 1] = v
    out[:, :, 2] = v
    out[:, :, 3] = 255
    return ImageBuffer(out)


def mask_from_image(image: ImageBuffer) -> Mask:
    return Mask(image.pixels[:, :, 0] > 127)


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    """Read a config JSON file, apply flag overrides (flags win), validate.

    Relative paths resolve against the config file's directory. Raises
    ConfigError carrying every problem found, not just the first.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config: no such file {path}"])
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: invalid JSON ({exc})"])
    return parse_config(obj, base_dir=path.parent, overrides=overrides)


def parse_config(obj, base_dir=Path("."), overrides: dict | None = None) -> PipelineConfig:
    if not isinstance(obj, dict):
        raise ConfigError(["config must be a JSON object"])
    obj = _apply_overrides(obj, overrides or {})
    base_dir = Path(base_dir)
    problems: list[str] = []

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base_dir / p

    input_path = None
    if not obj.get("input"):
        problems.append("input: required image path is missing")
    else:
        input_path = resolve(obj["input"])
        if not input_path.exists():
            problems.append(f"input: no such file {input_path}")

    clicks = ClickSet()
    clicks_obj = obj.get("clicks")
    if isinstance(clicks_obj, str):
        clicks_path = resolve(clicks_obj)
        if not clicks_path.exists():
            problems.append(f"clicks: no such file {clicks_path}")
        else:
            try:
                clicks = ClickSet.from_json_obj(json.loads(clicks_path.read_text()))
            except (json.JSONDecodeError, ValueError) as exc:
                problems.append(f"clicks: {exc}")
    elif isinstance(clicks_obj, dict):
        try:
            clicks = ClickSet.from_json_obj(clicks_obj)
        except ValueError as exc:
            problems.append(f"clicks: {exc}")
    elif clicks_obj is not None:
        problems.append("clicks: must be a file path or an inline click object")

    seg_obj = obj.get("segmentation", {})
    seg = SegmentationParams()
    if not isinstance(seg_obj, dict):
        problems.append("segmentation: must be an object")
    else:
        weights = seg_obj.get("weights", list(DEFAULT_WEIGHTS))
        seg = SegmentationParams(
            k=seg_obj.get("k", DEFAULT_K),
            seed=seg_obj.get("seed", 0),
            weights=tuple(weights) if isinstance(weights, (list, tuple)) else (weights,),
            closing_radius=seg_obj.get("closing_radius", DEFAULT_CLOSING_RADIUS),
            policy=seg_obj.get("policy", DEFAULT_POLICY),
            merge_threshold=seg_obj.get("merge_threshold"),
        )
        if not isinstance(seg.k, int) or seg.k < 1:
            problems.append(f"segmentation.k: must be an integer >= 1, got {seg.k!r}")
        if len(seg.weights) != 5 or any(
            not isinstance(w, (int, float)) or w <= 0 for w in seg.weights
        ):
            problems.append("segmentation.weights: must be 5 positive numbers")
        if not isinstance(seg.closing_radius, (int, float)) or seg.closing_radius < 0:
            problems.append("segmentation.closing_radius: must be >= 0")
        if seg.policy not in ("all", "largest", "clicked"):
            problems.append(f"segmentation.policy: unknown policy {seg.policy!r}")

    inp_obj = obj.get("inpaint", {})
    inpaint_cfg = InpaintConfig()
    if not isinstance(inp_obj, dict):
        problems.append("inpaint: must be an object")
    else:
        try:
            inpaint_cfg = InpaintConfig(
                pre_dilation=inp_obj.get("pre_dilation", 3),
                tolerance=inp_obj.get("tolerance", 0.1),
                max_iterations=inp_obj.get("max_iterations", 10000),
            )
        except (TypeError, ValueError) as exc:
            problems.append(f"inpaint: {exc}")

    anim_obj = obj.get("animation", {"kind": "jump"})
    animation = AnimationSpec(kind="jump")
    spec_problems = validate_spec_obj(anim_obj)
    if spec_problems:
        problems.extend(f"animation.{p}" for p in spec_problems)
    else:
        animation = AnimationSpec.from_json_obj(anim_obj)

    out_obj = obj.get("output", {})
    gif_path = None
    frames_dir = None
    delay_cs = None
    if not isinstance(out_obj, dict):
        problems.append("output: must be an object")
    else:
        if out_obj.get("gif"):
            gif_path = resolve(out_obj["gif"])
        if out_obj.get("frames_dir"):
            frames_dir = resolve(out_obj["frames_dir"])
        delay_cs = out_obj.get("delay_cs")
        if delay_cs is not None and (
            not isinstance(delay_cs, int) or not (0 <= delay_cs <= 0xFFFF)
        ):
            problems.append(f"output.delay_cs: must be an integer in [0, 65535], got {delay_cs!r}")

    sampling = obj.get("sampling", "bilinear")
    if sampling not in SAMPLING_MODES:
        problems.append(f"sampling: must be one of {SAMPLING_MODES}, got {sampling!r}")

    mesh_obj = obj.get("mesh", {})
    subject_cells = DEFAULT_SUBJECT_CELLS
    background_cells = DEFAULT_BACKGROUND_CELLS
    if not isinstance(mesh_obj, dict):
        problems.append("mesh: must be an object")
    else:
        for name, default in (
            ("subject_cells", DEFAULT_SUBJECT_CELLS),
            ("background_cells", DEFAULT_BACKGROUND_CELLS),
        ):
            val = mesh_obj.get(name, list(default))
            if (
                not isinstance(val, (list, tuple))
                or len(val) != 2
                or any(not isinstance(c, int) or c < 1 for c in val)
            ):
                problems.append(f"mesh.{name}: must be two integers >= 1")
            elif name == "subject_cells":
                subject_cells = tuple(val)
            else:
                background_cells = tuple(val)

    workdir = resolve(obj.get("workdir", "stillmotion-artifacts"))
    if gif_path is None and frames_dir is None:
        gif_path = workdir / "out.gif"

    if problems:
        raise ConfigError(problems)
    return PipelineConfig(
        input_path=input_path,
        clicks=clicks,
        segmentation=seg,
        inpaint=inpaint_cfg,
        animation=animation,
        gif_path=gif_path,
        frames_dir=frames_dir,
        delay_cs=delay_cs,
        sampling=sampling,
        subject_cells=subject_cells,
        background_cells=background_cells,
        workdir=workdir,
    )


def _apply_overrides(obj: dict, overrides: dict) -> dict:
    """Deep-merge CLI flag values over the config document."""
    out = json.loads(json.dumps(obj))  # deep copy, keeps plain JSON types
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = out
        parts = dotted.split(".")
        for p in parts[:-1]:
            nxt = node.get(p)
            if not isinstance(nxt, dict):
                nxt = {}
                node[p] = nxt
            node = nxt
        node[parts[-1]] = value
    return out


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def run_pipeline(config: PipelineConfig) -> dict:
    """segment -> inpaint -> animate, writing artifacts and returning the
    run report. Deterministic for a fixed config and seed.
    """
    report: dict = {"backend": kernels.BACKEND, "timings": {}, "outputs": {}}

    t0 = time.perf_counter()
    try:
        image = load_image(config.input_path)
        mask = compute_mask(image, config.clicks, config.segmentation)
    except Exception as exc:
        raise StageError("segment", exc) from exc
    save_image(mask_to_image(mask), config.workdir / MASK_ARTIFACT)
    report["outputs"]["mask"] = str(config.workdir / MASK_ARTIFACT)
    report["mask_area"] = mask.area()
    report["timings"]["segment"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        outcome = compute_plate(image, mask, config.inpaint)
    except Exception as exc:
        raise StageError("inpaint", exc) from exc
    save_image(outcome.image, config.workdir / PLATE_ARTIFACT)
    report["outputs"]["inpainted"] = str(config.workdir / PLATE_ARTIFACT)
    report["inpaint"] = {
        "residual": outcome.residual,
        "iterations": outcome.iterations,
        "converged": outcome.converged,
    }
    report["timings"]["inpaint"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        frames = render_clip(
            image,
            mask,
            outcome.image,
            config.animation,
            config.sampling,
            config.subject_cells,
            config.background_cells,
        )
        gif_bytes = encode_gif(frames, config.resolved_delay_cs())
    except Exception as exc:
        raise StageError("animate", exc) from exc
    if config.gif_path is not None:
        config.gif_path.parent.mkdir(parents=True, exist_ok=True)
        config.gif_path.write_bytes(gif_bytes)
        report["outputs"]["gif"] = str(config.gif_path)
    if config.frames_dir is not None:
        paths = write_frame_sequence(frames, config.frames_dir, "frame")
        report["outputs"]["frames"] = [str(p) for p in paths]
    report["frame_count"] = len(frames)
    report["timings"]["animate"] = time.perf_counter() - t0
    return report


def run_stage(config: PipelineConfig, stage: str) -> dict:
    """Run one stage against on-disk artifacts, so intermediate results can
    be inspected (input image / subject mask / inpainted plate).
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}, expected one of {STAGES}")
    report: dict = {"backend": kernels.BACKEND, "stage": stage, "outputs": {}}
    mask_path = config.workdir / MASK_ARTIFACT
    plate_path = config.workdir / PLATE_ARTIFACT

    if stage == "segment":
        try:
            image = load_image(config.input_path)
            mask = compute_mask(image, config.clicks, config.segmentation)
        except Exception as exc:
            raise StageError("segment", exc) from exc
        save_image(mask_to_image(mask), mask_path)
        report["outputs"]["mask"] = str(mask_path)
        report["mask_area"] = mask.area()
        return report

    if stage == "inpaint":
        if not mask_path.exists():
            raise StageError("inpaint", f"missing artifact: mask ({mask_path})")
        try:
            image = load_image(config.input_path)
            mask = mask_from_image(load_image(mask_path))
            outcome = compute_plate(image, mask, config.inpaint)
        except Exception as exc:
            raise StageError("inpaint", exc) from exc
        save_image(outcome.image, plate_path)
        report["outputs"]["inpainted"] = str(plate_path)
        report["inpaint"] = {
            "residual": outcome.residual,
            "iterations": outcome.iterations,
            "converged": outcome.converged,
        }
        return report

    if not mask_path.exists():
        raise StageError("animate", f"missing artifact: mask ({mask_path})")
    if not plate_path.exists():
        raise StageError("animate", f"missing artifact: inpainted ({plate_path})")
    try:
        image = load_image(config.input_path)
        mask = mask_from_image(load_image(mask_path))
        plate = load_image(plate_path)
        frames = render_clip(
            image,
            mask,
            plate,
            config.animation,
            config.sampling,
            config.subject_cells,
            config.background_cells,
        )
        gif_bytes = encode_gif(frames, config.resolved_delay_cs())
    except Exception as exc:
        raise StageError("animate", exc) from exc
    if config.gif_path is not None:
        config.gif_path.parent.mkdir(parents=True, exist_ok=True)
        config.gif_path.write_bytes(gif_bytes)
        report["outputs"]["gif"] = str(config.gif_path)
    if config.frames_dir is not None:
        paths = write_frame_sequence(frames, config.frames_dir, "frame")
        report["outputs"]["frames"] = [str(p) for p in paths]
    report["frame_count"] = len(frames)
    return report
