"""Deformable discriminative correlation filter tracking.

The filter is a linear combination of movable sub-filters; coefficients
are learned by conjugate gradient in the Fourier domain and the sub-filter
positions by safeguarded Barzilai-Borwein descent under an affine
deformation prior.
"""

from .evaluation import Box, SuccessCurve, iou, overlap_precision, success_curve
from .tracker import (DeformableCorrelationTracker, FrameResult, TrackerParams,
                      track_sequence)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "SuccessCurve",
    "iou",
    "overlap_precision",
    "success_curve",
    "DeformableCorrelationTracker",
    "FrameResult",
    "TrackerParams",
    "track_sequence",
    "__version__",
]
