"""Command-line entry points.

    stillmotion run -c config.json [--out out.gif]
    stillmotion segment|inpaint|animate -c config.json [overrides]
    stillmotion serve --port 8000

Exit codes: 0 success, 2 configuration/validation error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, StageError
from .pipeline import load_config, run_pipeline, run_stage

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAGE = 3


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("-c", "--config", required=True, help="pipeline config JSON")
    p.add_argument("--out", help="GIF output path (overrides output.gif)")
    p.add_argument("--frames-dir", help="directory for PNG frames (overrides output.frames_dir)")
    p.add_argument("--delay", type=int, help="GIF frame delay in centiseconds")
    p.add_argument("--workdir", help="stage artifact directory")
    p.add_argument("--seed", type=int, help="clustering seed")
    p.add_argument("--k", type=int, help="cluster count")
    p.add_argument("--frames", type=int, help="animation frame count")
    p.add_argument("--sampling", choices=("nearest", "bilinear"), help="texture sampling mode")
    p.add_argument("--inpaint-dilation", type=int, help="mask growth before filling, px")
    p.add_argument("--inpaint-tol", type=float, help="fill residual tolerance, intensity levels")
    p.add_argument("--inpaint-iters", type=int, help="fill iteration budget")


def _overrides(args) -> dict:
    return {
        "output.gif": args.out,
        "output.frames_dir": args.frames_dir,
        "output.delay_cs": args.delay,
        "workdir": args.workdir,
        "segmentation.seed": args.seed,
        "segmentation.k": args.k,
        "animation.frames": args.frames,
        "sampling": args.sampling,
        "inpaint.pre_dilation": args.inpaint_dilation,
        "inpaint.tolerance": args.inpaint_tol,
        "inpaint.max_iterations": args.inpaint_iters,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stillmotion",
        description="Animate a still image: segment by clicks, inpaint the "
        "background, deform a textured mesh, export a GIF.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="full pipeline: segment, inpaint, animate")
    _add_common_flags(run_p)

    for stage in ("segment", "inpaint", "animate"):
        sp = sub.add_parser(stage, help=f"run only the {stage} stage")
        _add_common_flags(sp)

    serve_p = sub.add_parser("serve", help="start the HTTP session API")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=None, help="defaults to $PORT or 8000")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        from .service import serve

        serve(host=args.host, port=args.port)
        return EXIT_OK

    try:
        config = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "run":
            report = run_pipeline(config)
        else:
            report = run_stage(config, args.command)
    except StageError as exc:
        print(f"stage error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    print(json.dumps(report, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
