"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import numpy as np


def check_frame(frame) -> np.ndarray:
    """Validate an image frame: 2-D grayscale or 3-channel RGB, non-empty."""
    arr = np.asarray(frame)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim not in (2, 3):
        raise ValueError(f"frame must be HxW or HxWx3, got shape {arr.shape}")
    if arr.ndim == 3 and arr.shape[2] != 3:
        raise ValueError(f"color frames need 3 channels, got {arr.shape[2]}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("empty frame")
    return arr


def check_bbox(bbox, frame_shape: tuple[int, int]) -> tuple[float, float, float, float]:
    """Validate an (x, y, w, h) box: positive area, inside the frame."""
    if len(bbox) != 4:
        raise ValueError(f"bbox must be (x, y, w, h), got {bbox!r}")
    x, y, w, h = (float(v) for v in bbox)
    if w <= 0 or h <= 0:
        raise ValueError(f"bbox must have positive area, got w={w}, h={h}")
    fh, fw = frame_shape[:2]
    if x < 0 or y < 0 or x + w > fw or y + h > fh:
        raise ValueError(
            f"bbox ({x}, {y}, {w}, {h}) lies outside the {fw}x{fh} frame"
        )
    return x, y, w, h
