"""Filter training: Gaussian labels, weighted sample memory, the
matrix-free normal-equations operator, and its conjugate-gradient solve.

The coefficient update minimizes a weighted least-squares data term plus a
spatial regularizer.  With A the block operator mapping coefficients to
per-sample scores, G the diagonal of sample weights and W the convolution
operator of the regularizer spectra, the stationarity condition is

    (A^H G A + W^H W) f = A^H G y

solved iteratively with conjugate gradient (warm-started between frames).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError
from .filters import (FilterCoefficients, FilterLayout, check_sample_blocks,
                      crop_block, full_score_raw, shift_phase,
                      subfilter_score_raw)
from .spectral import Spectrum, SpectrumLayout


def gaussian_label(layout: SpectrumLayout, sigma: tuple[float, float],
                   peak_offset: tuple[float, float] = (0.0, 0.0)) -> Spectrum:
    """Fourier coefficients of a periodically summed Gaussian peak.

    The represented function is sum_n exp(-|t - o - n*T|^2 / (2 sigma^2))
    with unit peak amplitude; its coefficients are the sampled continuous
    transform, real-symmetric for any real offset.
    """
    s1, s2 = float(sigma[0]), float(sigma[1])
    if s1 <= 0 or s2 <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    t1, t2 = layout.period
    o1, o2 = peak_offset
    k1 = layout.freqs(0)
    k2 = layout.freqs(1)
    amp = 2.0 * np.pi * s1 * s2 / (t1 * t2)
    g1 = np.exp(-2.0 * np.pi**2 * s1**2 * k1**2 / t1**2)
    g2 = np.exp(-2.0 * np.pi**2 * s2**2 * k2**2 / t2**2)
    ph1 = np.exp(-2j * np.pi * k1 * o1 / t1)
    ph2 = np.exp(-2j * np.pi * k2 * o2 / t2)
    coeffs = amp * np.multiply.outer(g1 * ph1, g2 * ph2)
    return Spectrum(layout, coeffs)


class TrainingSample:
    """One training sample: channel spectra, label, weight and positions."""

    def __init__(self, spectra: list[np.ndarray], label: np.ndarray,
                 positions: np.ndarray, weight: float = 1.0):
        self.spectra = [np.asarray(g, dtype=np.complex128) for g in spectra]
        self.label = np.asarray(label, dtype=np.complex128)
        self.positions = np.asarray(positions, dtype=np.float64)
        self.weight = float(weight)
        if self.weight < 0:
            raise ValueError("sample weight must be non-negative")


class SampleMemory:
    """Bounded, exponentially forgetting training set."""

    def __init__(self, layout: FilterLayout, capacity: int = 30,
                 learning_rate: float = 0.0125):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not 0 < learning_rate < 1:
            raise ValueError("learning rate must be in (0, 1)")
        self.layout = layout
        self.capacity = capacity
        self.learning_rate = learning_rate
        self.samples: list[TrainingSample] = []

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.samples])

    def upcoming_weight(self) -> float:
        """Weight the next inserted sample will receive."""
        return 1.0 if not self.samples else self.learning_rate

    def insert(self, sample: TrainingSample):
        """Append with exponential forgetting; evict the lightest sample
        when over capacity; renormalize weights to sum 1."""
        check_sample_blocks(self.layout, sample.spectra)
        if sample.label.shape != self.layout.score_layout.shape:
            raise DimensionError("label grid does not match score layout")
        if sample.positions.shape != (self.layout.nsub, 2):
            raise DimensionError("positions do not match sub-filter count")
        if not self.samples:
            sample.weight = 1.0
        else:
            for s in self.samples:
                s.weight *= 1.0 - self.learning_rate
            sample.weight = self.learning_rate
        self.samples.append(sample)
        if len(self.samples) > self.capacity:
            drop = min(range(len(self.samples)), key=lambda i: self.samples[i].weight)
            self.samples.pop(drop)
        total = sum(s.weight for s in self.samples)
        for s in self.samples:
            s.weight /= total


@dataclass(frozen=True)
class SpatialRegularizer:
    """Per-sub-filter regularization spectra (small centered grids).

    ``kernels[m]`` is the real coefficient grid of the penalty function for
    sub-filter ``m``, shared by all of its channels.
    """

    kernels: tuple[np.ndarray, ...]

    def __post_init__(self):
        for w in self.kernels:
            if w.ndim != 2 or w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
                raise DimensionError(f"kernel grid must be odd-sized, got {w.shape}")
            c = w[w.shape[0] // 2, w.shape[1] // 2]
            if not c.real > 0:
                raise ValueError("regularizer mean coefficient must be positive")


def quadratic_regularizer(period: tuple[float, float],
                          radii: list[tuple[float, float]],
                          w_min: float, steepness: float,
                          support: int = 2,
                          equalize: bool = False) -> SpatialRegularizer:
    """Bowl-shaped penalty w(t) = w_min*(1 + steepness*((t1/r1)^2+(t2/r2)^2)).

    Coefficients of the periodic quadratic are kept on a (2*support+1)^2
    grid; they decay like 1/k^2 so a tiny support captures the bowl.
    With ``equalize`` every kernel is rescaled to the same mean penalty
    (DC coefficient ``w_min``), so tighter radii concentrate the penalty
    instead of inflating it.
    """
    t1, t2 = period
    ks = np.arange(-support, support + 1)
    kernels = []
    safe = np.where(ks == 0, 1, ks).astype(float)
    for r1, r2 in radii:
        w = np.zeros((2 * support + 1, 2 * support + 1))
        # periodic extension of t^2 on [-T/2, T/2): DC T^2/12, else T^2(-1)^k/(2 pi^2 k^2)
        q1 = np.where(ks == 0, t1**2 / 12.0,
                      t1**2 * (-1.0) ** np.abs(ks) / (2.0 * np.pi**2 * safe**2))
        q2 = np.where(ks == 0, t2**2 / 12.0,
                      t2**2 * (-1.0) ** np.abs(ks) / (2.0 * np.pi**2 * safe**2))
        w[support, support] = w_min
        w[:, support] += w_min * steepness * q1 / r1**2
        w[support, :] += w_min * steepness * q2 / r2**2
        if equalize:
            w *= w_min / w[support, support]
        kernels.append(w)
    return SpatialRegularizer(tuple(kernels))


def conv_full(grid: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Full 2-D convolution over the two leading axes."""
    a1, a2 = grid.shape[:2]
    b1, b2 = kernel.shape
    out_shape = (a1 + b1 - 1, a2 + b2 - 1) + grid.shape[2:]
    out = np.zeros(out_shape, dtype=np.result_type(grid, kernel))
    for i in range(b1):
        for j in range(b2):
            w = kernel[i, j]
            if w != 0:
                out[i:i + a1, j:j + a2] += w * grid
    return out


def corr_valid(grid: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Valid cross-correlation (adjoint of ``conv_full``) over leading axes."""
    b1, b2 = kernel.shape
    a1 = grid.shape[0] - b1 + 1
    a2 = grid.shape[1] - b2 + 1
    out_shape = (a1, a2) + grid.shape[2:]
    out = np.zeros(out_shape, dtype=np.result_type(grid, kernel))
    for i in range(b1):
        for j in range(b2):
            w = np.conj(kernel[i, j])
            if w != 0:
                out += w * grid[i:i + a1, j:j + a2]
    return out


def _sample_phases(layout: FilterLayout, positions: np.ndarray) -> list[np.ndarray]:
    return [shift_phase(layout, positions[m]) for m in range(layout.nsub)]


def apply_normal_operator(f: FilterCoefficients, memory: SampleMemory,
                          reg: SpatialRegularizer) -> FilterCoefficients:
    """Matrix-free application of (A^H G A + W^H W) to ``f``."""
    layout = f.layout
    if len(reg.kernels) != layout.nsub:
        raise DimensionError("regularizer kernel count does not match sub-filters")
    out = FilterCoefficients.zeros(layout)
    kmax = layout.kmax
    for sample in memory.samples:
        if sample.weight == 0.0:
            continue
        phases = _sample_phases(layout, sample.positions)
        score = np.zeros(layout.score_layout.shape, dtype=np.complex128)
        sub_scores = []
        for m in range(layout.nsub):
            s_m = subfilter_score_raw(layout, f.coeffs[m], sample.spectra)
            sub_scores.append(s_m)
            score += phases[m] * s_m
        for m in range(layout.nsub):
            back = np.conj(phases[m]) * score
            for bi, b in enumerate(layout.blocks):
                cropped = crop_block(back, kmax, b.kmax)
                out.coeffs[m][bi] += (sample.weight *
                                      np.conj(sample.spectra[bi]) * cropped[:, :, None])
    for m in range(layout.nsub):
        for bi in range(len(layout.blocks)):
            w = reg.kernels[m]
            out.coeffs[m][bi] += corr_valid(conv_full(f.coeffs[m][bi], w), w)
    return out


def rhs_vector(memory: SampleMemory, layout: FilterLayout) -> FilterCoefficients:
    """Right-hand side A^H G y of the normal equations."""
    out = FilterCoefficients.zeros(layout)
    kmax = layout.kmax
    for sample in memory.samples:
        if sample.weight == 0.0:
            continue
        phases = _sample_phases(layout, sample.positions)
        for m in range(layout.nsub):
            back = np.conj(phases[m]) * sample.label
            for bi, b in enumerate(layout.blocks):
                cropped = crop_block(back, kmax, b.kmax)
                out.coeffs[m][bi] += (sample.weight *
                                      np.conj(sample.spectra[bi]) * cropped[:, :, None])
    return out


def conjugate_gradient(apply_op, b: np.ndarray, x0: np.ndarray,
                       max_iter: int, tol: float,
                       callback=None) -> tuple[np.ndarray, dict]:
    """Standard CG for a Hermitian positive-definite operator.

    Stops when ||r|| <= tol * ||b|| or after ``max_iter`` iterations.
    Raises NumericalError when the residual degenerates to NaN/Inf.
    """
    b_norm = math.sqrt(np.vdot(b, b).real)
    if b_norm == 0.0:
        return np.zeros_like(b), {"iterations": 0, "relative_residual": 0.0}
    x = x0.astype(np.complex128).copy()
    r = b - apply_op(x)
    p = r.copy()
    rs = np.vdot(r, r).real
    iterations = 0
    for _ in range(max_iter):
        if not np.isfinite(rs):
            raise NumericalError("conjugate gradient residual is not finite")
        if math.sqrt(rs) <= tol * b_norm:
            break
        ap = apply_op(p)
        p_ap = np.vdot(p, ap).real
        if not np.isfinite(p_ap) or p_ap <= 0.0:
            raise NumericalError("operator lost positive-definiteness")
        alpha = rs / p_ap
        x += alpha * p
        r -= alpha * ap
        rs_new = np.vdot(r, r).real
        p = r + (rs_new / rs) * p
        rs = rs_new
        iterations += 1
        if callback is not None:
            callback(x)
    if not np.isfinite(rs):
        raise NumericalError("conjugate gradient residual is not finite")
    return x, {"iterations": iterations,
               "relative_residual": math.sqrt(rs) / b_norm}


def solve_coefficients(memory: SampleMemory, reg: SpatialRegularizer,
                       max_iter: int = 100, tol: float = 1e-6,
                       warm_start: FilterCoefficients | None = None,
                       callback=None) -> tuple[FilterCoefficients, dict]:
    """Solve the normal equations by CG, re-symmetrizing the result.

    On numerical failure the warm start (or zero filter) is returned
    unchanged with ``info["aborted"] = True``.
    """
    if not memory.samples:
        raise ValueError("sample memory is empty")
    if not any(s.weight > 0 for s in memory.samples):
        raise ValueError("all sample weights are zero")
    layout = memory.layout
    start = warm_start if warm_start is not None else FilterCoefficients.zeros(layout)

    def apply_vec(vec):
        f = FilterCoefficients.from_vector(layout, vec)
        return apply_normal_operator(f, memory, reg).to_vector()

    b = rhs_vector(memory, layout).to_vector()
    try:
        x, info = conjugate_gradient(apply_vec, b, start.to_vector(),
                                     max_iter=max_iter, tol=tol, callback=callback)
    except NumericalError:
        return start, {"iterations": 0, "relative_residual": float("nan"),
                       "aborted": True}
    info["aborted"] = False
    return FilterCoefficients.from_vector(layout, x).symmetrized(), info


def objective(f: FilterCoefficients, memory: SampleMemory,
              reg: SpatialRegularizer, deform_state=None) -> tuple[float, float, float]:
    """The three loss terms: weighted data misfit, spatial penalty,
    position-prior penalty (0 when no deformation state is given)."""
    e1 = 0.0
    for sample in memory.samples:
        score = full_score_raw(f, sample.spectra, sample.positions)
        e1 += sample.weight * float(np.sum(np.abs(score - sample.label) ** 2))
    e2 = 0.0
    for m in range(f.layout.nsub):
        for bi in range(len(f.layout.blocks)):
            conv = conv_full(f.coeffs[m][bi], reg.kernels[m])
            e2 += float(np.sum(np.abs(conv) ** 2))
    e3 = 0.0
    if deform_state is not None:
        from .deformation import reg_energy
        e3 = reg_energy(deform_state)
    return e1, e2, e3
