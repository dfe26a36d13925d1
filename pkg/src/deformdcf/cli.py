"""Command-line interface: ``track``, ``eval`` and ``demo`` subcommands."""

from __future__ import annotations

import argparse
import os
import sys

from . import config as cfg
from . import synthetic
from .errors import ConfigurationError, DeformDCFError, ParseError, SequenceError
from .evaluation import (Box, iou, overlap_precision, parse_groundtruth,
                         success_curve)
from .tracker import FrameResult, track_sequence

FRAME_EXTENSIONS = (".png", ".bmp", ".ppm", ".pgm", ".tif", ".tiff", ".jpg", ".jpeg")

EXIT_USAGE = 2
EXIT_BAD_FRAME = 3
EXIT_LENGTH_MISMATCH = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deformdcf",
        description="Deformable correlation filter tracking, evaluation and demos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    track = sub.add_parser("track", help="track a target through an image sequence")
    track.add_argument("--sequence", required=True,
                       help="directory of frames in ascending lexicographic order")
    track.add_argument("--init", help="initial box as x,y,w,h")
    track.add_argument("--groundtruth", help="annotation file; first line initializes")
    track.add_argument("--output", required=True, help="result CSV path")
    track.add_argument("--config", help="key = value configuration file")
    track.add_argument("--param", action="append", default=[],
                       metavar="KEY=VALUE", help="override one configuration key")
    track.add_argument("--render", help="directory for frames with overlays")

    ev = sub.add_parser("eval", help="score tracking results against ground truth")
    ev.add_argument("--results", required=True, help="CSV written by 'track'")
    ev.add_argument("--groundtruth", required=True)
    ev.add_argument("--curve", help="write threshold,op pairs to this file")

    demo = sub.add_parser("demo", help="generate a synthetic sequence")
    demo.add_argument("--kind", required=True,
                      help="one of: " + ", ".join(synthetic.KINDS))
    demo.add_argument("--frames", type=int, required=True)
    demo.add_argument("--out", required=True, help="output directory")
    demo.add_argument("--seed", type=int, default=0)
    return parser


def _list_frames(directory: str) -> list[str]:
    if not os.path.isdir(directory):
        return []
    names = sorted(n for n in os.listdir(directory)
                   if n.lower().endswith(FRAME_EXTENSIONS))
    return [os.path.join(directory, n) for n in names]


def _parse_init(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"--init needs x,y,w,h, got {text!r}")
    return tuple(float(p) for p in parts)


def format_result_line(r: FrameResult) -> str:
    b = r.box
    fields = [str(r.frame_index)] + [
        f"{v:.6f}" for v in (b.x, b.y, b.w, b.h, r.score)
    ]
    for m in range(r.positions.shape[0]):
        fields.append(f"{r.positions[m, 1]:.6f}")  # x
        fields.append(f"{r.positions[m, 0]:.6f}")  # y
    t = r.transform
    # transform entries in (x, y) coordinate order
    fields += [f"{t[1, 1]:.6f}", f"{t[1, 0]:.6f}", f"{t[0, 1]:.6f}", f"{t[0, 0]:.6f}"]
    return ",".join(fields)


def write_results(path: str, results: list[FrameResult]):
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(format_result_line(r) + "\n")


def read_results(path: str) -> list[Box]:
    boxes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) < 5:
                raise ParseError("result line has fewer than 5 fields", line=lineno)
            x, y, w, h = (float(v) for v in parts[1:5])
            boxes.append(Box(x, y, w, h))
    return boxes


def render_overlays(render_dir: str, frame_paths: list[str],
                    results: list[FrameResult]):
    from PIL import Image, ImageDraw

    os.makedirs(render_dir, exist_ok=True)
    for path, r in zip(frame_paths, results):
        with Image.open(path) as img:
            img = img.convert("RGB")
            draw = ImageDraw.Draw(img)
            b = r.box
            draw.rectangle([b.x, b.y, b.x + b.w, b.y + b.h],
                           outline=(0, 255, 0), width=2)
            for m in range(r.positions.shape[0]):
                py, px = r.positions[m]
                color = (255, 220, 0) if m == 0 else (255, 60, 60)
                draw.ellipse([px - 3, py - 3, px + 3, py + 3],
                             outline=color, width=2)
            img.save(os.path.join(render_dir, os.path.basename(path)))


def cmd_track(args) -> int:
    frames = _list_frames(args.sequence)
    if not frames:
        print(f"error: no frames found in sequence directory {args.sequence!r}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.init:
            init_box = _parse_init(args.init)
        elif args.groundtruth:
            init_box = parse_groundtruth(args.groundtruth)[0]
            init_box = (init_box.x, init_box.y, init_box.w, init_box.h)
        else:
            print("error: provide --init x,y,w,h or --groundtruth FILE",
                  file=sys.stderr)
            return EXIT_USAGE
    except (ValueError, ParseError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("usage: deformdcf track --sequence DIR --init x,y,w,h "
              "--output FILE", file=sys.stderr)
        return EXIT_USAGE
    try:
        file_values = cfg.parse_config_file(args.config) if args.config else {}
        overrides = cfg.parse_overrides(args.param)
        params = cfg.resolve_params(file_values, overrides)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        results = track_sequence(frames, init_box, params,
                                 precomputed=params.precomputed_path)
    except SequenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_FRAME
    except DeformDCFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_results(args.output, results)
    if args.render:
        render_overlays(args.render, frames, results)
    return 0


def cmd_eval(args) -> int:
    try:
        predictions = read_results(args.results)
        truth = parse_groundtruth(args.groundtruth)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(predictions) != len(truth):
        print(f"error: {len(predictions)} results vs {len(truth)} "
              "ground-truth boxes", file=sys.stderr)
        return EXIT_LENGTH_MISMATCH
    ious = [iou(p, t) for p, t in zip(predictions, truth)]
    op = overlap_precision(ious, 0.5)
    curve = success_curve(ious)
    print(f"OP={op:.4f} AUC={curve.auc:.4f}")
    if args.curve:
        with open(args.curve, "w", encoding="utf-8") as fh:
            for t, v in zip(curve.thresholds, curve.op_values):
                fh.write(f"{t:.2f},{v:.6f}\n")
    return 0


def cmd_demo(args) -> int:
    try:
        frames, boxes = synthetic.make_sequence(args.kind, args.frames,
                                                seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    synthetic.write_sequence(args.out, frames, boxes)
    print(f"wrote {len(frames)} frames to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "track":
        return cmd_track(args)
    if args.command == "eval":
        return cmd_eval(args)
    return cmd_demo(args)


if __name__ == "__main__":
    sys.exit(main())
