"""Synthetic demo sequences with exact ground truth.

Three generators cover the motions the tracker is built for: pure
translation, in-plane rotation, and an articulating pair of blobs whose
separation oscillates.  Frames are RGB uint8; ground truth is analytic.
"""

from __future__ import annotations

import os

import numpy as np

from .evaluation import Box

KINDS = ("translate", "rotate", "articulate")


def _texture(rng: np.random.Generator, shape: tuple[int, int],
             block: int = 4) -> np.ndarray:
    """High-contrast colored block texture."""
    b1 = (shape[0] + block - 1) // block
    b2 = (shape[1] + block - 1) // block
    coarse = rng.integers(30, 226, size=(b1, b2, 3), dtype=np.int64)
    tex = np.repeat(np.repeat(coarse, block, axis=0), block, axis=1)
    return tex[:shape[0], :shape[1]].astype(np.float64)


def _background(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    base = rng.normal(115.0, 8.0, size=(shape[0], shape[1], 1))
    jitter = rng.normal(0.0, 4.0, size=(shape[0], shape[1], 3))
    return np.clip(base + jitter, 0, 255)


def _paste(frame: np.ndarray, tex: np.ndarray, top: int, left: int):
    h, w = tex.shape[:2]
    frame[top:top + h, left:left + w] = tex


def _bilinear(tex: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    h, w = tex.shape[:2]
    r = np.clip(rows, 0.0, h - 1.0)
    c = np.clip(cols, 0.0, w - 1.0)
    r0 = np.floor(r).astype(int)
    c0 = np.floor(c).astype(int)
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    fr = (r - r0)[..., None]
    fc = (c - c0)[..., None]
    top = tex[r0, c0] * (1 - fc) + tex[r0, c1] * fc
    bot = tex[r1, c0] * (1 - fc) + tex[r1, c1] * fc
    return top * (1 - fr) + bot * fr


def _translate(n_frames: int, rng, shape):
    target = (40, 40)
    tex = _texture(rng, target)
    bg = _background(rng, shape)
    y0, x0 = 50, 24
    frames, boxes = [], []
    for c in range(n_frames):
        frame = bg.copy()
        x = x0 + 2 * c
        _paste(frame, tex, y0, x)
        frames.append(np.clip(frame, 0, 255).astype(np.uint8))
        boxes.append(Box(float(x), float(y0), float(target[1]), float(target[0])))
    return frames, boxes


def _rotate(n_frames: int, rng, shape):
    bar = (44.0, 56.0)  # (height, width)
    tex = _texture(rng, (int(bar[0]), int(bar[1])), block=5)
    # quadrant tints give the corners distinct color statistics
    h2, w2 = int(bar[0]) // 2, int(bar[1]) // 2
    tints = ((1.0, 0.45, 0.4), (0.45, 0.65, 1.0), (0.5, 1.0, 0.5), (1.0, 1.0, 0.45))
    tex[:h2, :w2] *= tints[0]
    tex[:h2, w2:] *= tints[1]
    tex[h2:, :w2] *= tints[2]
    tex[h2:, w2:] *= tints[3]
    bg = _background(rng, shape)
    cy, cx = shape[0] / 2.0, shape[1] / 2.0
    half_diag = 0.5 * float(np.hypot(*bar)) + 2.0
    r_lo = max(0, int(np.floor(cy - half_diag)))
    r_hi = min(shape[0], int(np.ceil(cy + half_diag)))
    c_lo = max(0, int(np.floor(cx - half_diag)))
    c_hi = min(shape[1], int(np.ceil(cx + half_diag)))
    rr, cc = np.meshgrid(np.arange(r_lo, r_hi) + 0.5 - cy,
                         np.arange(c_lo, c_hi) + 0.5 - cx, indexing="ij")
    frames, boxes = [], []
    for c in range(n_frames):
        theta = np.deg2rad(3.0 * c)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        # rotate image offsets back into the bar's own coordinates
        br = cos_t * rr + sin_t * cc
        bc = -sin_t * rr + cos_t * cc
        inside = (np.abs(br) <= bar[0] / 2.0) & (np.abs(bc) <= bar[1] / 2.0)
        frame = bg.copy()
        vals = _bilinear(tex, br + bar[0] / 2.0 - 0.5, bc + bar[1] / 2.0 - 0.5)
        region = frame[r_lo:r_hi, c_lo:c_hi]
        region[inside] = vals[inside]
        frames.append(np.clip(frame, 0, 255).astype(np.uint8))
        w = bar[1] * abs(cos_t) + bar[0] * abs(sin_t)
        h = bar[1] * abs(sin_t) + bar[0] * abs(cos_t)
        boxes.append(Box(cx - w / 2.0, cy - h / 2.0, w, h))
    return frames, boxes


def _articulate(n_frames: int, rng, shape):
    blob = 26
    tex_a = _texture(rng, (blob, blob))
    tex_b = _texture(rng, (blob, blob))
    bg = _background(rng, shape)
    cy, cx = shape[0] // 2, shape[1] // 2
    frames, boxes = [], []
    for c in range(n_frames):
        sep = 36.0 + 12.0 * np.sin(2.0 * np.pi * c / 20.0)
        left = int(round(cx - sep / 2.0 - blob / 2.0))
        right = int(round(cx + sep / 2.0 - blob / 2.0))
        top = cy - blob // 2
        frame = bg.copy()
        _paste(frame, tex_a, top, left)
        _paste(frame, tex_b, top, right)
        frames.append(np.clip(frame, 0, 255).astype(np.uint8))
        boxes.append(Box(float(left), float(top),
                         float(right + blob - left), float(blob)))
    return frames, boxes


def make_sequence(kind: str, n_frames: int, seed: int = 0,
                  shape: tuple[int, int] = (150, 200)):
    """Generate (frames, boxes) for one demo kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown demo kind {kind!r}; choose from {KINDS}")
    if n_frames < 1:
        raise ValueError("need at least one frame")
    rng = np.random.default_rng(seed)
    if kind == "translate":
        return _translate(n_frames, rng, shape)
    if kind == "rotate":
        return _rotate(n_frames, rng, shape)
    return _articulate(n_frames, rng, shape)


def write_sequence(out_dir: str, frames, boxes) -> tuple[list[str], str]:
    """Write frames as PNGs plus a groundtruth.txt; returns (paths, gt path)."""
    from PIL import Image

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames, start=1):
        path = os.path.join(out_dir, f"{i:04d}.png")
        Image.fromarray(frame).save(path)
        paths.append(path)
    gt_path = os.path.join(out_dir, "groundtruth.txt")
    with open(gt_path, "w", encoding="utf-8") as fh:
        for b in boxes:
            fh.write(f"{b.x:.6f},{b.y:.6f},{b.w:.6f},{b.h:.6f}\n")
    return paths, gt_path
