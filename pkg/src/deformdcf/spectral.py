"""Truncated two-dimensional Fourier series over a rectangular period.

A periodic function f(t1, t2) with periods (T1, T2) is represented by its
complex coefficients c[k1, k2] for k1 in [-K1, K1], k2 in [-K2, K2]:

    f(t1, t2) = sum_k c[k1, k2] * exp(i*2*pi*(k1*t1/T1 + k2*t2/T2))

Coefficients are stored on a dense ``(2*K1+1, 2*K2+1)`` complex grid with
index ``[K1 + k1, K2 + k2]``.  Real-valued functions satisfy
``c[-k1, -k2] == conj(c[k1, k2])``; operations documented as preserving
realness keep that symmetry up to floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class SpectrumLayout:
    """Periods and per-axis truncation of a coefficient grid.

    Parameters
    ----------
    period : (T1, T2)
        Continuous-domain periods, both positive.
    kmax : (K1, K2)
        Largest retained frequency index per axis, both >= 0.
    """

    period: tuple[float, float]
    kmax: tuple[int, int]

    def __post_init__(self):
        t1, t2 = self.period
        k1, k2 = self.kmax
        if not (t1 > 0 and t2 > 0):
            raise ValueError(f"periods must be positive, got {self.period}")
        if k1 < 0 or k2 < 0 or k1 != int(k1) or k2 != int(k2):
            raise ValueError(f"kmax must be non-negative integers, got {self.kmax}")
        object.__setattr__(self, "period", (float(t1), float(t2)))
        object.__setattr__(self, "kmax", (int(k1), int(k2)))

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.kmax[0] + 1, 2 * self.kmax[1] + 1)

    def freqs(self, axis: int) -> np.ndarray:
        """Frequency indices -K..K along the given axis."""
        k = self.kmax[axis]
        return np.arange(-k, k + 1)


@dataclass(frozen=True)
class Spectrum:
    """Immutable truncated Fourier coefficient grid."""

    layout: SpectrumLayout
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.layout.shape:
            raise DimensionError(
                f"coefficient grid {c.shape} does not match layout {self.layout.shape}"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


def zeros(layout: SpectrumLayout) -> Spectrum:
    return Spectrum(layout, np.zeros(layout.shape, dtype=np.complex128))


def is_real_symmetric(s: Spectrum, tol: float = 1e-9) -> bool:
    """True when ``c[-k] == conj(c[k])`` within ``tol`` (scaled by magnitude)."""
    c = s.coeffs
    flipped = np.conj(c[::-1, ::-1])
    scale = 1.0 + float(np.max(np.abs(c))) if c.size else 1.0
    return bool(np.max(np.abs(c - flipped)) <= tol * scale)


def symmetrize(s: Spectrum) -> Spectrum:
    """Project onto the real-function subspace: average c[k] and conj(c[-k])."""
    c = s.coeffs
    return Spectrum(s.layout, 0.5 * (c + np.conj(c[::-1, ::-1])))


def _require_same_layout(a: Spectrum, b: Spectrum):
    if a.layout != b.layout:
        raise DimensionError(f"layout mismatch: {a.layout} vs {b.layout}")


# ---------------------------------------------------------------------------
# Interpolation kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterpolationKernel:
    """Bandlimited interpolation kernel for an N1 x N2 sample grid.

    ``spectrum`` holds the kernel's Fourier coefficients at the layout
    truncation; the represented kernel is the bandlimited projection of a
    separable cubic-convolution kernel scaled to the sample spacing.
    """

    spectrum: Spectrum
    nsamples: tuple[int, int]


def _keys_cubic_transform(freqs: np.ndarray, a: float = -0.75) -> np.ndarray:
    """Continuous Fourier transform of the Keys cubic kernel at ``freqs``.

    The kernel is even with support [-2, 2] (in units of the sample
    spacing), so the transform is real:  2 * int_0^2 u(s) cos(2 pi f s) ds.
    Evaluated by 64-node Gauss-Legendre quadrature on [0,1] and [1,2];
    the integrand is smooth and |f| stays small, so the result is accurate
    to well below 1e-12.
    """
    nodes, weights = np.polynomial.legendre.leggauss(64)

    def piece(lo, hi, poly):
        s = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * weights
        vals = poly(s)
        ang = 2.0 * np.pi * np.multiply.outer(np.asarray(freqs, dtype=float), s)
        return np.cos(ang) @ (w * vals)

    near = piece(0.0, 1.0, lambda s: (a + 2) * s**3 - (a + 3) * s**2 + 1.0)
    far = piece(1.0, 2.0, lambda s: a * (s**3 - 5 * s**2 + 8 * s - 4.0))
    return 2.0 * (near + far)


@lru_cache(maxsize=None)
def _kernel_axis_coeffs(n: int, k: int, a: float) -> np.ndarray:
    ks = np.arange(-k, k + 1)
    return _keys_cubic_transform(ks / n, a) / n


def cubic_kernel(layout: SpectrumLayout, nsamples: tuple[int, int],
                 a: float = -0.75) -> InterpolationKernel:
    """Build the separable cubic interpolation kernel for a sample grid."""
    n1, n2 = int(nsamples[0]), int(nsamples[1])
    if n1 < 1 or n2 < 1:
        raise ValueError(f"sample counts must be >= 1, got {nsamples}")
    c1 = _kernel_axis_coeffs(n1, layout.kmax[0], a)
    c2 = _kernel_axis_coeffs(n2, layout.kmax[1], a)
    grid = np.multiply.outer(c1, c2).astype(np.complex128)
    return InterpolationKernel(Spectrum(layout, grid), (n1, n2))


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def interpolate_stack(samples: np.ndarray, kernel: InterpolationKernel) -> np.ndarray:
    """Interpolate one or more channels sharing a sample grid.

    ``samples`` has shape (N1, N2) or (N1, N2, D).  Grid node (n1, n2)
    sits at t = (n1*T1/N1, n2*T2/N2).  Returns raw coefficients of shape
    ``layout.shape`` (plus the trailing channel axis when present).
    """
    x = np.asarray(samples, dtype=np.float64)
    n1, n2 = kernel.nsamples
    if x.shape[0] != n1 or x.shape[1] != n2:
        raise DimensionError(
            f"sample grid {x.shape[:2]} does not match kernel grid {(n1, n2)}"
        )
    layout = kernel.spectrum.layout
    dft = np.fft.fft2(x, axes=(0, 1))
    k1 = layout.freqs(0) % n1
    k2 = layout.freqs(1) % n2
    picked = dft[np.ix_(k1, k2)]
    bhat = kernel.spectrum.coeffs
    if picked.ndim == 3:
        return picked * bhat[:, :, None]
    return picked * bhat


def interpolate(samples: np.ndarray, kernel: InterpolationKernel,
                layout: SpectrumLayout) -> Spectrum:
    """Truncated Fourier coefficients of the kernel-interpolated sample grid."""
    if layout != kernel.spectrum.layout:
        raise DimensionError("kernel was built for a different layout")
    return Spectrum(layout, interpolate_stack(samples, kernel))


def evaluate(s: Spectrum, t) -> float | np.ndarray:
    """Evaluate the represented real function at point(s) ``t``.

    ``t`` is a pair (t1, t2) or an array of shape (..., 2).  The spectrum
    must be real-symmetric; the residual imaginary part is checked to be
    negligible and discarded.
    """
    if not is_real_symmetric(s):
        raise DomainError("evaluate requires a real-symmetric spectrum")
    t_arr = np.asarray(t, dtype=np.float64)
    single = t_arr.ndim == 1
    pts = np.atleast_2d(t_arr)
    t1, t2 = s.layout.period
    e1 = np.exp(2j * np.pi * np.multiply.outer(pts[..., 0] / t1, s.layout.freqs(0)))
    e2 = np.exp(2j * np.pi * np.multiply.outer(pts[..., 1] / t2, s.layout.freqs(1)))
    vals = np.einsum("...i,ij,...j->...", e1, s.coeffs, e2)
    bad = np.abs(vals.imag) > 1e-8 * (1.0 + np.abs(vals.real))
    if np.any(bad):
        raise DomainError("non-negligible imaginary part in evaluation")
    out = vals.real
    return float(out[0]) if single else out


def shift(s: Spectrum, p) -> Spectrum:
    """Translate the represented function by ``p``: result(t) = f(t - p)."""
    p1, p2 = float(p[0]), float(p[1])
    t1, t2 = s.layout.period
    ph1 = np.exp(-2j * np.pi * p1 * s.layout.freqs(0) / t1)
    ph2 = np.exp(-2j * np.pi * p2 * s.layout.freqs(1) / t2)
    return Spectrum(s.layout, s.coeffs * np.multiply.outer(ph1, ph2))


def inner(a: Spectrum, b: Spectrum) -> complex:
    """L2 inner product <a, b> = sum_k a[k] * conj(b[k])."""
    _require_same_layout(a, b)
    return complex(np.sum(a.coeffs * np.conj(b.coeffs)))


def norm2(a: Spectrum) -> float:
    """Squared L2 norm; equals (1/(T1*T2)) * integral of f^2 over one period."""
    return float(np.sum(np.abs(a.coeffs) ** 2))


def pointwise_mul(a: Spectrum, b: Spectrum) -> Spectrum:
    """Coefficient-wise product (the spectral form of periodic convolution)."""
    _require_same_layout(a, b)
    return Spectrum(a.layout, a.coeffs * b.coeffs)


def grid_values(s: Spectrum, shape: tuple[int, int]) -> np.ndarray:
    """Sample the represented function on a uniform G1 x G2 grid.

    Grid node (g1, g2) is at t = (g1*T1/G1, g2*T2/G2).  Computed with a
    zero-padded inverse FFT; requires G >= 2*K+1 per axis so no
    coefficients alias.
    """
    return grid_values_raw(s.coeffs, s.layout, shape)


def grid_values_raw(coeffs: np.ndarray, layout: SpectrumLayout,
                    shape: tuple[int, int]) -> np.ndarray:
    g1, g2 = int(shape[0]), int(shape[1])
    k1, k2 = layout.kmax
    if g1 < 2 * k1 + 1 or g2 < 2 * k2 + 1:
        raise DimensionError(
            f"grid {shape} too coarse for truncation {(k1, k2)}"
        )
    padded = np.zeros((g1, g2), dtype=np.complex128)
    padded[np.ix_(layout.freqs(0) % g1, layout.freqs(1) % g2)] = coeffs
    vals = np.fft.ifft2(padded) * (g1 * g2)
    return vals.real
