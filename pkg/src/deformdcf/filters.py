"""Sub-filter coefficient containers and Fourier-domain score operators.

A deformable filter is M sub-filters, each holding per-channel coefficient
grids truncated to the channel block's own bandwidth and implicitly
zero-padded to the full layout truncation when scores are assembled.
Channels sharing a grid resolution are stacked into blocks (trailing axis)
so the hot paths stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .spectral import Spectrum, SpectrumLayout


@dataclass(frozen=True)
class BlockLayout:
    """One group of channels sharing a sample grid."""

    nsamples: tuple[int, int]
    channels: int

    @property
    def kmax(self) -> tuple[int, int]:
        return (self.nsamples[0] // 2, self.nsamples[1] // 2)

    @property
    def shape(self) -> tuple[int, int, int]:
        k1, k2 = self.kmax
        return (2 * k1 + 1, 2 * k2 + 1, self.channels)


@dataclass(frozen=True)
class FilterLayout:
    """Full layout: periods, per-block truncations, sub-filter count."""

    period: tuple[float, float]
    blocks: tuple[BlockLayout, ...]
    nsub: int

    def __post_init__(self):
        if self.nsub < 1:
            raise ValueError("need at least one sub-filter")
        if not self.blocks:
            raise ValueError("need at least one channel block")

    @property
    def kmax(self) -> tuple[int, int]:
        return (max(b.kmax[0] for b in self.blocks),
                max(b.kmax[1] for b in self.blocks))

    @property
    def score_layout(self) -> SpectrumLayout:
        return SpectrumLayout(self.period, self.kmax)

    def block_layout(self, i: int) -> SpectrumLayout:
        return SpectrumLayout(self.period, self.blocks[i].kmax)

    @property
    def channels(self) -> int:
        return sum(b.channels for b in self.blocks)

    @property
    def size(self) -> int:
        per_sub = sum(int(np.prod(b.shape)) for b in self.blocks)
        return self.nsub * per_sub


def pad_block(block: np.ndarray, kmax_from: tuple[int, int],
              kmax_to: tuple[int, int]) -> np.ndarray:
    """Zero-pad a centered coefficient grid to a larger truncation."""
    d1 = kmax_to[0] - kmax_from[0]
    d2 = kmax_to[1] - kmax_from[1]
    if d1 < 0 or d2 < 0:
        raise DimensionError("cannot pad to a smaller truncation")
    pads = [(d1, d1), (d2, d2)] + [(0, 0)] * (block.ndim - 2)
    return np.pad(block, pads)


def crop_block(grid: np.ndarray, kmax_from: tuple[int, int],
               kmax_to: tuple[int, int]) -> np.ndarray:
    """Crop a centered coefficient grid to a smaller truncation."""
    d1 = kmax_from[0] - kmax_to[0]
    d2 = kmax_from[1] - kmax_to[1]
    if d1 < 0 or d2 < 0:
        raise DimensionError("cannot crop to a larger truncation")
    sl1 = slice(d1, grid.shape[0] - d1)
    sl2 = slice(d2, grid.shape[1] - d2)
    return grid[sl1, sl2]


def shift_phase(layout: FilterLayout, p) -> np.ndarray:
    """Translation phase factor exp(-i*2*pi*(k1*p1/T1 + k2*p2/T2))."""
    t1, t2 = layout.period
    k1, k2 = layout.kmax
    ph1 = np.exp(-2j * np.pi * float(p[0]) * np.arange(-k1, k1 + 1) / t1)
    ph2 = np.exp(-2j * np.pi * float(p[1]) * np.arange(-k2, k2 + 1) / t2)
    return np.multiply.outer(ph1, ph2)


class FilterCoefficients:
    """Coefficients of all sub-filters, block-stacked.

    ``coeffs[m][b]`` is the complex grid of sub-filter ``m`` for block
    ``b`` with shape ``layout.blocks[b].shape``.  Vectorization order is
    sub-filter-major, then block, then row-major grid, then channel.
    """

    def __init__(self, layout: FilterLayout, coeffs=None):
        self.layout = layout
        if coeffs is None:
            coeffs = [[np.zeros(b.shape, dtype=np.complex128)
                       for b in layout.blocks]
                      for _ in range(layout.nsub)]
        else:
            if len(coeffs) != layout.nsub:
                raise DimensionError("sub-filter count mismatch")
            coeffs = [[np.asarray(g, dtype=np.complex128) for g in per_sub]
                      for per_sub in coeffs]
            for per_sub in coeffs:
                if len(per_sub) != len(layout.blocks):
                    raise DimensionError("block count mismatch")
                for g, b in zip(per_sub, layout.blocks):
                    if g.shape != b.shape:
                        raise DimensionError(
                            f"block grid {g.shape} does not match {b.shape}"
                        )
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, layout: FilterLayout) -> "FilterCoefficients":
        return cls(layout)

    def copy(self) -> "FilterCoefficients":
        return FilterCoefficients(
            self.layout, [[g.copy() for g in per_sub] for per_sub in self.coeffs]
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([g.ravel() for per_sub in self.coeffs
                               for g in per_sub])

    @classmethod
    def from_vector(cls, layout: FilterLayout, vec: np.ndarray) -> "FilterCoefficients":
        if vec.size != layout.size:
            raise DimensionError(
                f"vector length {vec.size} does not match layout size {layout.size}"
            )
        out = []
        pos = 0
        for _ in range(layout.nsub):
            per_sub = []
            for b in layout.blocks:
                n = int(np.prod(b.shape))
                per_sub.append(vec[pos:pos + n].reshape(b.shape).astype(np.complex128))
                pos += n
            out.append(per_sub)
        return cls(layout, out)

    def symmetrized(self) -> "FilterCoefficients":
        """Project every grid onto the real-function subspace."""
        out = [[0.5 * (g + np.conj(g[::-1, ::-1, :])) for g in per_sub]
               for per_sub in self.coeffs]
        return FilterCoefficients(self.layout, out)

    def channel_spectrum(self, sub: int, channel: int) -> Spectrum:
        """One channel of one sub-filter as a Spectrum (block truncation)."""
        for bi, b in enumerate(self.layout.blocks):
            if channel < b.channels:
                return Spectrum(self.layout.block_layout(bi),
                                self.coeffs[sub][bi][:, :, channel])
            channel -= b.channels
        raise DimensionError(f"channel index out of range")


def check_sample_blocks(layout: FilterLayout, spectra: list[np.ndarray]):
    if len(spectra) != len(layout.blocks):
        raise DimensionError(
            f"sample has {len(spectra)} blocks, layout has {len(layout.blocks)}"
        )
    for g, b in zip(spectra, layout.blocks):
        if g.shape != b.shape:
            raise DimensionError(
                f"sample block {g.shape} does not match layout block {b.shape}"
            )


def subfilter_score_raw(layout: FilterLayout, sub_coeffs: list[np.ndarray],
                        spectra: list[np.ndarray]) -> np.ndarray:
    """Channel-summed score of one sub-filter on one sample (full grid)."""
    kmax = layout.kmax
    k1, k2 = kmax
    acc = np.zeros((2 * k1 + 1, 2 * k2 + 1), dtype=np.complex128)
    for g, x, b in zip(sub_coeffs, spectra, layout.blocks):
        prod = np.einsum("ijd,ijd->ij", g, x)
        bk = b.kmax
        acc[k1 - bk[0]:k1 + bk[0] + 1, k2 - bk[1]:k2 + bk[1] + 1] += prod
    return acc


def full_score_raw(f: FilterCoefficients, spectra: list[np.ndarray],
                   positions: np.ndarray) -> np.ndarray:
    """Score of the deformable filter: shifted sum of sub-filter scores."""
    layout = f.layout
    positions = np.asarray(positions, dtype=np.float64)
    if positions.shape != (layout.nsub, 2):
        raise DimensionError(
            f"positions shape {positions.shape}, expected {(layout.nsub, 2)}"
        )
    check_sample_blocks(layout, spectra)
    acc = np.zeros(layout.score_layout.shape, dtype=np.complex128)
    for m in range(layout.nsub):
        score_m = subfilter_score_raw(layout, f.coeffs[m], spectra)
        acc += shift_phase(layout, positions[m]) * score_m
    return acc


# Spectrum-typed wrappers -----------------------------------------------------

def subfilter_score(f: FilterCoefficients, sub: int,
                    spectra: list[np.ndarray]) -> Spectrum:
    check_sample_blocks(f.layout, spectra)
    raw = subfilter_score_raw(f.layout, f.coeffs[sub], spectra)
    return Spectrum(f.layout.score_layout, raw)


def full_score(f: FilterCoefficients, spectra: list[np.ndarray],
               positions: np.ndarray) -> Spectrum:
    return Spectrum(f.layout.score_layout, full_score_raw(f, spectra, positions))
