"""Tracking quality metrics: IoU, overlap precision, success curves,
and ground-truth file parsing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError

SUCCESS_THRESHOLDS = np.round(np.arange(21) * 0.05, 10)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box: top-left corner (x, y) and size (w, h), pixels."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError(f"box size must be non-negative, got {self.w}x{self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)


def iou(a: Box, b: Box) -> float:
    """Intersection-over-union; 0 when the union has zero area.

    All extents are measured as corner differences so that identical boxes
    give exactly 1.0 regardless of rounding.
    """
    ax2, ay2 = a.x + a.w, a.y + a.h
    bx2, by2 = b.x + b.w, b.y + b.h
    ix = max(0.0, min(ax2, bx2) - max(a.x, b.x))
    iy = max(0.0, min(ay2, by2) - max(a.y, b.y))
    inter = ix * iy
    union = (ax2 - a.x) * (ay2 - a.y) + (bx2 - b.x) * (by2 - b.y) - inter
    return inter / union if union > 0 else 0.0


def overlap_precision(ious, threshold: float) -> float:
    """Fraction of frames whose IoU strictly exceeds ``threshold``."""
    vals = np.asarray(ious, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("need at least one IoU value")
    return float(np.mean(vals > threshold))


@dataclass(frozen=True)
class SuccessCurve:
    thresholds: np.ndarray
    op_values: np.ndarray
    auc: float


def success_curve(ious) -> SuccessCurve:
    """Overlap precision over the 21-point threshold grid 0, 0.05, ..., 1.

    The area under the curve is the unweighted mean of the OP values.
    """
    vals = np.asarray(ious, dtype=np.float64)
    if vals.size == 0:
        raise ValueError("need at least one IoU value")
    ops = np.array([overlap_precision(vals, t) for t in SUCCESS_THRESHOLDS])
    return SuccessCurve(SUCCESS_THRESHOLDS.copy(), ops, float(ops.mean()))


def parse_groundtruth(path: str) -> list[Box]:
    """Read one x,y,w,h box per line (comma- or whitespace-separated)."""
    boxes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            if len(parts) != 4:
                raise ParseError(f"expected 4 fields, got {len(parts)}", line=lineno)
            try:
                x, y, w, h = (float(p) for p in parts)
            except ValueError:
                raise ParseError(f"non-numeric field in {text!r}", line=lineno) from None
            boxes.append(Box(x, y, w, h))
    return boxes
