"""Online tracking loop and the scikit-learn style estimator around it.

The loop follows the usual two-step scheme: detect the new target center
and scale by maximizing the continuous score over a scale pyramid, then
update the model (sub-filter position descent, transform re-estimation,
sample insertion, warm-started coefficient solve).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator

from . import features as ft
from .deformation import BBParams, DeformationState, bb_descent, wrap_positions
from .errors import NumericalError, SequenceError
from .evaluation import Box
from .filters import (BlockLayout, FilterCoefficients, FilterLayout,
                      full_score_raw)
from .spectral import SpectrumLayout, cubic_kernel, grid_values_raw, interpolate_stack
from .training import (SampleMemory, TrainingSample, gaussian_label,
                       quadratic_regularizer, solve_coefficients)
from .validation import check_bbox, check_frame

PART_GRID_AREA_THRESHOLD = 6400.0  # px^2; below: 2x2 part grid, else 3x3


@dataclass(frozen=True)
class TrackerParams:
    """Validated hyper-parameter set of the tracker."""

    parts: str | int = "auto"
    deformation: str = "affine"
    position_weight: float = 3e-4
    features: str = "auto"
    precomputed_path: str | None = None
    precomputed_scale: float = 0.5
    cell_size: int = 4
    padding: float = 4.0
    patch_shape: str = "square"
    scale_count: int = 5
    scale_step: float = 1.02
    scale_penalty: float = 0.96
    scale_min: float = 0.2
    scale_max: float = 5.0
    learning_rate: float = 0.0125
    memory_size: int = 30
    label_sigma_factor: float = 0.1
    label_amplitude: float = 32.0
    reg_base: float = 0.1
    reg_steepness: float = 20.0
    cg_init_iters: int = 100
    cg_update_iters: int = 5
    cg_tol: float = 1e-6
    bb_iters: int = 10
    bb_initial_step: float = 1.0
    bb_step_min: float = 1e-4
    bb_step_max: float = 1e4
    min_cells: int = 8
    max_cells: int = 50
    oversample: int = 4
    newton_iters: int = 5

    def __post_init__(self):
        if self.parts != "auto" and self.parts not in (0, 4, 9):
            raise ValueError("parts must be 'auto', 0, 4 or 9")
        if self.deformation not in ("affine", "identity", "none"):
            raise ValueError("deformation must be 'affine', 'identity' or 'none'")
        if self.position_weight < 0:
            raise ValueError("position_weight must be non-negative")
        if self.scale_count < 1 or self.scale_count % 2 == 0:
            raise ValueError("scale_count must be odd and >= 1")
        if self.scale_step <= 1.0:
            raise ValueError("scale_step must exceed 1")
        if not 0 < self.scale_penalty <= 1:
            raise ValueError("scale_penalty must be in (0, 1]")
        if self.cell_size < 1:
            raise ValueError("cell_size must be >= 1")
        if self.padding < 1.0:
            raise ValueError("padding (area factor) must be >= 1")
        if self.patch_shape not in ("square", "proportional"):
            raise ValueError("patch_shape must be 'square' or 'proportional'")
        if not 0 < self.learning_rate < 1:
            raise ValueError("learning_rate must be in (0, 1)")
        if self.memory_size < 1:
            raise ValueError("memory_size must be >= 1")
        if self.label_sigma_factor <= 0:
            raise ValueError("label_sigma_factor must be positive")
        if self.label_amplitude <= 0:
            raise ValueError("label_amplitude must be positive")
        if self.min_cells < 3:
            raise ValueError("min_cells must be >= 3")
        if self.max_cells < self.min_cells:
            raise ValueError("max_cells must be >= min_cells")
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")
        if not 0 < self.precomputed_scale <= 2:
            raise ValueError("precomputed_scale must be in (0, 2]")
        if not 0 < self.scale_min <= self.scale_max:
            raise ValueError("need 0 < scale_min <= scale_max")

    def bb_params(self) -> BBParams:
        return BBParams(max_iters=self.bb_iters, initial_step=self.bb_initial_step,
                        step_min=self.bb_step_min, step_max=self.bb_step_max)


@dataclass(frozen=True)
class FrameData:
    """One frame plus its optional precomputed feature grid."""

    image: np.ndarray
    pre_grid: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.image.shape[:2]


class TargetGeometry:
    """Fixed per-target geometry: grids, layouts, kernels and unit scales.

    The continuous feature domain has periods equal to the base cell grid;
    one domain unit corresponds to ``unit_px * scale`` image pixels.  The
    target center always lands on the center node of every channel grid,
    so spectra are shifted to put the origin at the target center.
    """

    def __init__(self, size: tuple[float, float], frame_shape: tuple[int, int],
                 params: TrackerParams, rgb: bool, pre_depth: int | None):
        self.size = (float(size[0]), float(size[1]))  # (h, w) px
        self.params = params
        pad = float(np.sqrt(params.padding))
        if params.patch_shape == "square":
            side = pad * float(np.sqrt(self.size[0] * self.size[1]))
            self.padded = (side, side)
        else:
            self.padded = (self.size[0] * pad, self.size[1] * pad)
        csz = params.cell_size
        self.cells = tuple(
            int(np.clip(round(p / csz), params.min_cells, params.max_cells))
            for p in self.padded
        )
        self.patch_shape = (self.cells[0] * csz, self.cells[1] * csz)
        self.period = (float(self.cells[0]), float(self.cells[1]))
        # image pixels per domain unit, per axis, at scale 1
        self.unit_px = (self.padded[0] / self.cells[0],
                        self.padded[1] / self.cells[1])
        self.patch_center = ((self.cells[0] // 2 + 0.5) * csz,
                             (self.cells[1] // 2 + 0.5) * csz)
        self.frame_shape = frame_shape

        names = params.features
        if names == "auto":
            names = "grayscale+colornames" if rgb else "grayscale"
        self.feature_names = tuple(names.split("+"))
        blocks = []
        self._block_kind = []
        for name in self.feature_names:
            if name == "grayscale":
                blocks.append(BlockLayout(self.cells, 1))
                self._block_kind.append("grayscale")
            elif name == "colornames":
                if not rgb:
                    raise ValueError("colornames features need RGB frames")
                blocks.append(BlockLayout(self.cells, ft.CN_CHANNELS))
                self._block_kind.append("colornames")
            elif name == "precomputed":
                if pre_depth is None:
                    raise ValueError("precomputed features need precomputed_path")
                pre_cells = tuple(
                    max(3, int(round(c * params.precomputed_scale)))
                    for c in self.cells
                )
                blocks.append(BlockLayout(pre_cells, pre_depth))
                self._block_kind.append("precomputed")
            else:
                raise ValueError(f"unknown feature set {name!r}")
        self.nsub = self._sub_filter_count()
        self.layout = FilterLayout(self.period, tuple(blocks), self.nsub)
        self.score_layout = self.layout.score_layout

        self._kernels = [cubic_kernel(self.layout.block_layout(i), b.nsamples)
                         for i, b in enumerate(self.layout.blocks)]
        self._center_phases = [self._centering_phase(i)
                               for i in range(len(blocks))]
        sigma = (params.label_sigma_factor * self.size[0] / self.unit_px[0],
                 params.label_sigma_factor * self.size[1] / self.unit_px[1])
        self.label = params.label_amplitude * gaussian_label(self.score_layout, sigma).coeffs

        extent_units = (self.size[0] / self.unit_px[0],
                        self.size[1] / self.unit_px[1])
        self._radii = [(extent_units[0] / 2.0, extent_units[1] / 2.0)]
        self._radii += [(extent_units[0] / 6.0, extent_units[1] / 6.0)] * (self.nsub - 1)
        self.regularizer = None
        self.anchors = self._anchor_grid(extent_units)

    def build_regularizer(self, spectra: list[np.ndarray]):
        """Fix the penalty strength relative to the first sample's energy.

        The per-coefficient magnitude of interpolated spectra scales with
        1/(N1*N2), so an absolute penalty would not transfer across
        resolutions or feature sets; anchoring it to the root-mean-square
        coefficient keeps ``reg_base`` a dimensionless knob.
        """
        total = sum(float(np.sum(np.abs(s) ** 2)) for s in spectra)
        count = sum(s.size for s in spectra)
        energy = float(np.sqrt(total / count))
        self.regularizer = quadratic_regularizer(
            self.period, self._radii,
            self.params.reg_base * energy, self.params.reg_steepness,
            equalize=True,
        )

    def _sub_filter_count(self) -> int:
        parts = self.params.parts
        if parts == "auto":
            area = self.size[0] * self.size[1]
            parts = 4 if area < PART_GRID_AREA_THRESHOLD else 9
        return 1 + int(parts)

    def _anchor_grid(self, extent_units) -> np.ndarray:
        anchors = [(0.0, 0.0)]
        nparts = self.nsub - 1
        if nparts == 4:
            offsets = [-0.25, 0.25]
        elif nparts == 9:
            offsets = [-1.0 / 3.0, 0.0, 1.0 / 3.0]
        else:
            offsets = []
        for o1 in offsets:
            for o2 in offsets:
                anchors.append((o1 * extent_units[0], o2 * extent_units[1]))
        return np.asarray(anchors, dtype=np.float64)

    def _centering_phase(self, block_index: int) -> np.ndarray:
        """Phase moving the grid's center node onto the domain origin."""
        b = self.layout.blocks[block_index]
        t1, t2 = self.period
        n1, n2 = b.nsamples
        c1 = (n1 // 2) * (t1 / n1)
        c2 = (n2 // 2) * (t2 / n2)
        k1, k2 = b.kmax
        ph1 = np.exp(2j * np.pi * c1 * np.arange(-k1, k1 + 1) / t1)
        ph2 = np.exp(2j * np.pi * c2 * np.arange(-k2, k2 + 1) / t2)
        return np.multiply.outer(ph1, ph2)

    def extract(self, frame: FrameData, center: tuple[float, float],
                scale: float) -> ft.FeatureMap:
        """Feature blocks for the padded region around ``center``."""
        blocks = []
        patch_rgb = None
        patch_gray = None
        for kind, b in zip(self._block_kind, self.layout.blocks):
            if kind == "grayscale":
                if patch_gray is None:
                    patch_gray = ft.extract_patch(
                        ft.to_grayscale(frame.image), center, self.padded,
                        scale, self.patch_shape, self.patch_center)
                blocks.append(ft.grayscale_cells(patch_gray, self.params.cell_size))
            elif kind == "colornames":
                if patch_rgb is None:
                    patch_rgb = ft.extract_patch(
                        np.asarray(frame.image, dtype=np.float64) / 255.0,
                        center, self.padded, scale,
                        self.patch_shape, self.patch_center)
                blocks.append(ft.colornames(patch_rgb, self.params.cell_size))
            else:
                n1, n2 = b.nsamples
                node = (n1 // 2 + 0.5, n2 // 2 + 0.5)
                blocks.append(ft.resample_feature_grid(
                    frame.pre_grid, self.frame_shape, center, self.padded,
                    scale, (n1, n2), node))
        return ft.FeatureMap(tuple(blocks), center, self.padded, scale)

    def spectra(self, fmap: ft.FeatureMap) -> list[np.ndarray]:
        """Centered channel spectra of a feature map."""
        out = []
        for values, kernel, phase in zip(fmap.blocks, self._kernels,
                                         self._center_phases):
            out.append(interpolate_stack(values, kernel) * phase[:, :, None])
        return out

    def displacement_px(self, dt: np.ndarray, scale: float) -> np.ndarray:
        return np.asarray(dt) * np.array(self.unit_px) * scale


@dataclass(frozen=True)
class TrackState:
    """Complete model state of one tracked target."""

    geometry: TargetGeometry
    params: TrackerParams
    center: tuple[float, float]          # (y, x) px
    size: tuple[float, float]            # (h, w) px
    scale: float
    coeffs: FilterCoefficients
    deform: DeformationState
    memory: SampleMemory
    frame_index: int

    def box(self) -> Box:
        h = self.size[0] * self.scale
        w = self.size[1] * self.scale
        return Box(self.center[1] - w / 2.0, self.center[0] - h / 2.0, w, h)

    def absolute_positions(self) -> np.ndarray:
        """Sub-filter positions in image pixels, rows (y, x)."""
        offs = self.deform.positions * np.array(self.geometry.unit_px) * self.scale
        return np.asarray(self.center) + offs


@dataclass(frozen=True)
class FrameResult:
    frame_index: int
    box: Box
    score: float
    positions: np.ndarray                # (M, 2) image px, rows (y, x)
    transform: np.ndarray                # (2, 2)


def _predicted_positions(state: TrackState) -> np.ndarray:
    """Detection-time positions: prior prediction blended with persistence."""
    d = state.deform
    predicted = d.anchors @ d.transform.T
    return wrap_positions(0.5 * predicted + 0.5 * d.positions, d.period)


def _refine_peak(coeffs: np.ndarray, layout: SpectrumLayout, t0: np.ndarray,
                 iters: int, max_step: float) -> tuple[np.ndarray, float]:
    """Newton refinement of a score maximum on the trigonometric polynomial."""
    t1, t2 = layout.period
    k1 = layout.freqs(0)[:, None] / t1
    k2 = layout.freqs(1)[None, :] / t2
    t = np.asarray(t0, dtype=np.float64).copy()

    def value_grad_hess(point):
        ph = np.exp(2j * np.pi * (k1 * point[0] + k2 * point[1]))
        base = coeffs * ph
        val = float(np.sum(base).real)
        tp = 2.0 * np.pi
        g = np.array([np.sum(1j * tp * k1 * base).real,
                      np.sum(1j * tp * k2 * base).real])
        h11 = float(np.sum(-(tp * k1) ** 2 * base).real)
        h22 = float(np.sum(-(tp * k2) ** 2 * base).real)
        h12 = float(np.sum(-(tp**2) * k1 * k2 * base).real)
        return val, g, np.array([[h11, h12], [h12, h22]])

    v0, _, _ = value_grad_hess(t)
    best_t, best_v = t.copy(), v0
    for _ in range(iters):
        _, g, h = value_grad_hess(t)
        # keep only negative-definite steps (local maximum)
        if not (h[0, 0] < 0 and np.linalg.det(h) > 0):
            break
        step = np.linalg.solve(h, -g)
        norm = np.linalg.norm(step)
        if norm > max_step:
            step *= max_step / norm
        t = t + step
        v, _, _ = value_grad_hess(t)
        if v > best_v:
            best_t, best_v = t.copy(), v
    return best_t, best_v


def detect(state: TrackState, frame: FrameData) -> tuple[tuple[float, float], float, float]:
    """Locate the target: returns (center (y, x), scale, score)."""
    geo = state.geometry
    params = state.params
    layout = geo.score_layout
    positions = _predicted_positions(state)
    half = (params.scale_count - 1) // 2
    grid_shape = (params.oversample * layout.shape[0],
                  params.oversample * layout.shape[1])
    spacing = max(geo.period[0] / grid_shape[0], geo.period[1] / grid_shape[1])

    best = None
    for idx in range(params.scale_count):
        rel = params.scale_step ** (idx - half)
        scale = state.scale * rel
        fmap = geo.extract(frame, state.center, scale)
        spectra = geo.spectra(fmap)
        score = full_score_raw(state.coeffs, spectra, positions)
        vals = grid_values_raw(score, layout, grid_shape)
        flat = int(np.argmax(vals))
        peak = np.unravel_index(flat, vals.shape)
        vmax = float(vals[peak])
        if vals.max() - vals.min() <= 1e-12 * (1.0 + abs(vmax)):
            continue
        t0 = np.array([peak[0] * geo.period[0] / grid_shape[0],
                       peak[1] * geo.period[1] / grid_shape[1]])
        t_ref, v_ref = _refine_peak(score, layout, t0, params.newton_iters,
                                    max_step=2.0 * spacing)
        dt = wrap_positions(t_ref, geo.period)
        penalized = v_ref * params.scale_penalty ** abs(idx - half)
        cand = (penalized, v_ref, idx, dt, scale)
        if best is None or cand[0] > best[0]:
            best = cand
    if best is None:
        return state.center, state.scale, 0.0
    _, raw_score, idx, dt, scale = best
    dx = geo.displacement_px(dt, scale)
    center = (state.center[0] + float(dx[0]), state.center[1] + float(dx[1]))
    scale = float(np.clip(scale, params.scale_min, params.scale_max))
    return center, scale, float(raw_score)


def update(state: TrackState, frame: FrameData, center: tuple[float, float],
           scale: float) -> TrackState:
    """Model update at the detected state; keeps the old model on failure."""
    geo = state.geometry
    params = state.params
    fmap = geo.extract(frame, center, scale)
    spectra = geo.spectra(fmap)
    sample = TrainingSample(spectra, geo.label,
                            positions=_predicted_positions(state),
                            weight=state.memory.upcoming_weight())

    deform = replace(state.deform, positions=sample.positions)
    if params.deformation != "none" and bool(np.any(deform.movable)):
        try:
            deform = bb_descent(state.coeffs, sample, deform, params.bb_params())
        except NumericalError:
            deform = state.deform
    sample.positions = deform.positions.copy()

    state.memory.insert(sample)
    coeffs, info = solve_coefficients(
        state.memory, geo.regularizer, max_iter=params.cg_update_iters,
        tol=params.cg_tol, warm_start=state.coeffs)
    if info.get("aborted"):
        coeffs = state.coeffs
    return replace(state, center=center, scale=scale, coeffs=coeffs,
                   deform=deform, frame_index=state.frame_index + 1)


def init_state(frame: FrameData, bbox, params: TrackerParams) -> TrackState:
    """Build the initial model from the first frame and its bounding box."""
    image = check_frame(frame.image)
    x, y, w, h = check_bbox(bbox, image.shape[:2])
    rgb = image.ndim == 3
    pre_depth = frame.pre_grid.shape[2] if frame.pre_grid is not None else None
    geo = TargetGeometry((h, w), image.shape[:2], params, rgb, pre_depth)
    center = (y + h / 2.0, x + w / 2.0)

    fmap = geo.extract(frame, center, 1.0)
    spectra = geo.spectra(fmap)
    geo.build_regularizer(spectra)
    anchors = geo.anchors
    movable = np.ones(geo.nsub, dtype=bool)
    movable[0] = False  # the root stays centered on the target
    deform = DeformationState(
        anchors=anchors, positions=anchors.copy(), transform=np.eye(2),
        position_weight=params.position_weight,
        mode="identity" if params.deformation != "affine" else "affine",
        period=geo.period, movable=movable)

    memory = SampleMemory(geo.layout, capacity=params.memory_size,
                          learning_rate=params.learning_rate)
    memory.insert(TrainingSample(spectra, geo.label,
                                 positions=anchors.copy(), weight=1.0))
    coeffs, _ = solve_coefficients(memory, geo.regularizer,
                                   max_iter=params.cg_init_iters,
                                   tol=params.cg_tol)
    return TrackState(geometry=geo, params=params, center=center,
                      size=(h, w), scale=1.0, coeffs=coeffs, deform=deform,
                      memory=memory, frame_index=1)


def _result(state: TrackState, score: float) -> FrameResult:
    return FrameResult(state.frame_index, state.box(), score,
                       state.absolute_positions(),
                       np.asarray(state.deform.transform).copy())


def _load_frame(obj, index: int) -> np.ndarray:
    if isinstance(obj, np.ndarray):
        return obj
    from PIL import Image, UnidentifiedImageError
    try:
        with Image.open(obj) as img:
            if img.mode not in ("L", "RGB"):
                img = img.convert("RGB")
            return np.asarray(img)
    except (OSError, UnidentifiedImageError) as exc:
        raise SequenceError(f"cannot read frame {index}: {obj} ({exc})") from exc


def track_sequence(frames, init_bbox, params: TrackerParams | None = None,
                   precomputed: str | None = None) -> list[FrameResult]:
    """Track through a sequence of frames (arrays or image paths).

    The first frame initializes the model; every following frame runs
    detection then the model update.  Per-frame results carry the box, the
    detection score, absolute sub-filter positions and the transform.
    """
    frames = list(frames)
    if not frames:
        raise ValueError("need at least one frame")
    params = params or TrackerParams()
    feature_file = ft.FeatureFile(precomputed) if precomputed else None

    def frame_data(i):
        image = _load_frame(frames[i], i + 1)
        grid = feature_file.frame(i) if feature_file is not None else None
        return FrameData(image, grid)

    state = init_state(frame_data(0), init_bbox, params)
    first_score = _initial_score(state)
    results = [_result(state, first_score)]
    for i in range(1, len(frames)):
        data = frame_data(i)
        center, scale, score = detect(state, data)
        state = update(state, data, center, scale)
        results.append(_result(state, score))
    return results


def _initial_score(state: TrackState) -> float:
    sample = state.memory.samples[0]
    score = full_score_raw(state.coeffs, sample.spectra, sample.positions)
    return float(np.sum(score).real)


class DeformableCorrelationTracker(BaseEstimator):
    """Deformable correlation filter tracker with an estimator interface.

    ``fit(frame, bbox)`` learns the initial model, ``predict(frame)``
    locates the target without changing the model, and ``step(frame)``
    performs the full detect-and-update cycle used for tracking.  All
    constructor arguments are hyper-parameters in the scikit-learn sense
    and are available through ``get_params``/``set_params``.
    """

    def __init__(self, parts="auto", deformation="affine",
                 position_weight=3e-4, features="auto",
                 precomputed_path=None, precomputed_scale=0.5,
                 cell_size=4, padding=4.0, patch_shape="square",
                 scale_count=5, scale_step=1.02,
                 scale_penalty=0.96, scale_min=0.2, scale_max=5.0, learning_rate=0.0125,
                 memory_size=30, label_sigma_factor=0.1, label_amplitude=32.0,
                 reg_base=0.1,
                 reg_steepness=20.0, cg_init_iters=100, cg_update_iters=5,
                 cg_tol=1e-6, bb_iters=10, bb_initial_step=1.0,
                 bb_step_min=1e-4, bb_step_max=1e4, min_cells=8,
                 max_cells=50, oversample=4, newton_iters=5):
        self.parts = parts
        self.deformation = deformation
        self.position_weight = position_weight
        self.features = features
        self.precomputed_path = precomputed_path
        self.precomputed_scale = precomputed_scale
        self.cell_size = cell_size
        self.padding = padding
        self.patch_shape = patch_shape
        self.scale_count = scale_count
        self.scale_step = scale_step
        self.scale_penalty = scale_penalty
        self.scale_min = scale_min
        self.scale_max = scale_max
        self.learning_rate = learning_rate
        self.memory_size = memory_size
        self.label_sigma_factor = label_sigma_factor
        self.label_amplitude = label_amplitude
        self.reg_base = reg_base
        self.reg_steepness = reg_steepness
        self.cg_init_iters = cg_init_iters
        self.cg_update_iters = cg_update_iters
        self.cg_tol = cg_tol
        self.bb_iters = bb_iters
        self.bb_initial_step = bb_initial_step
        self.bb_step_min = bb_step_min
        self.bb_step_max = bb_step_max
        self.min_cells = min_cells
        self.max_cells = max_cells
        self.oversample = oversample
        self.newton_iters = newton_iters

    def _tracker_params(self) -> TrackerParams:
        return TrackerParams(**self.get_params())

    def _frame_data(self, frame, index: int) -> FrameData:
        image = _load_frame(frame, index)
        grid = None
        if self._feature_file is not None:
            grid = self._feature_file.frame(index - 1)
        return FrameData(image, grid)

    def fit(self, frame, bbox):
        """Initialize the model on the first frame; returns self."""
        params = self._tracker_params()
        self._feature_file = (ft.FeatureFile(params.precomputed_path)
                              if params.precomputed_path else None)
        self.state_ = init_state(self._frame_data(frame, 1), bbox, params)
        self.results_ = [_result(self.state_, _initial_score(self.state_))]
        return self

    def predict(self, frame) -> Box:
        """Locate the target in a frame without updating the model."""
        self._check_fitted()
        data = self._frame_data(frame, self.state_.frame_index + 1)
        center, scale, _ = detect(self.state_, data)
        h = self.state_.size[0] * scale
        w = self.state_.size[1] * scale
        return Box(center[1] - w / 2.0, center[0] - h / 2.0, w, h)

    def step(self, frame) -> FrameResult:
        """Detect the target and update the model; returns the frame result."""
        self._check_fitted()
        data = self._frame_data(frame, self.state_.frame_index + 1)
        center, scale, score = detect(self.state_, data)
        self.state_ = update(self.state_, data, center, scale)
        result = _result(self.state_, score)
        self.results_.append(result)
        return result

    def track(self, frames) -> list[FrameResult]:
        """Step through frames with the fitted model, one result each."""
        self._check_fitted()
        return [self.step(f) for f in frames]

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise RuntimeError("tracker is not fitted; call fit(frame, bbox) first")
