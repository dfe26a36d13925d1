"""Shared helpers: random spectra, dense operator assembly oracles."""

import numpy as np
import pytest

from deformdcf.filters import BlockLayout, FilterLayout
from deformdcf.spectral import Spectrum, SpectrumLayout


def random_real_symmetric(rng, layout, decay=0.0):
    """Random coefficients of a real function; optional frequency decay."""
    c = rng.normal(size=layout.shape) + 1j * rng.normal(size=layout.shape)
    if decay:
        k1 = layout.freqs(0)[:, None]
        k2 = layout.freqs(1)[None, :]
        c = c * np.exp(-decay * (k1**2 + k2**2))
    c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    return Spectrum(layout, c)


def random_layout(rng, max_k=6):
    k1 = int(rng.integers(1, max_k + 1))
    k2 = int(rng.integers(1, max_k + 1))
    t1 = float(rng.uniform(4.0, 20.0))
    t2 = float(rng.uniform(4.0, 20.0))
    return SpectrumLayout((t1, t2), (k1, k2))


def small_filter_layout(nsub=1, nsamples=((6, 6),), channels=(1,),
                        period=None):
    blocks = tuple(BlockLayout(tuple(n), c) for n, c in zip(nsamples, channels))
    if period is None:
        period = (float(max(n[0] for n in nsamples)),
                  float(max(n[1] for n in nsamples)))
    return FilterLayout(period, blocks, nsub)


def random_sample_spectra(rng, layout):
    """Random real-symmetric channel stacks matching a filter layout."""
    out = []
    for b in layout.blocks:
        c = rng.normal(size=b.shape) + 1j * rng.normal(size=b.shape)
        c = 0.5 * (c + np.conj(c[::-1, ::-1, :]))
        out.append(c)
    return out


def random_label(rng, layout):
    c = rng.normal(size=layout.score_layout.shape) \
        + 1j * rng.normal(size=layout.score_layout.shape)
    return 0.5 * (c + np.conj(c[::-1, ::-1]))


# ---------------------------------------------------------------------------
# Dense oracles: explicit loop-built matrices for the normal equations
# ---------------------------------------------------------------------------

def vector_index_map(layout):
    """(m, block, k1, k2, d) tuples in vectorization order."""
    entries = []
    for m in range(layout.nsub):
        for bi, b in enumerate(layout.blocks):
            k1, k2 = b.kmax
            for i1 in range(2 * k1 + 1):
                for i2 in range(2 * k2 + 1):
                    for d in range(b.channels):
                        entries.append((m, bi, i1 - k1, i2 - k2, d))
    return entries


def dense_data_matrix(layout, sample):
    """Rows: full score grid entries; columns: coefficient vector entries."""
    k1, k2 = layout.kmax
    t1, t2 = layout.period
    rows = (2 * k1 + 1) * (2 * k2 + 1)
    cols = layout.size
    entries = vector_index_map(layout)
    a = np.zeros((rows, cols), dtype=np.complex128)
    for col, (m, bi, f1, f2, d) in enumerate(entries):
        p1, p2 = sample.positions[m]
        beta = np.exp(-2j * np.pi * (p1 * f1 / t1 + p2 * f2 / t2))
        x = sample.spectra[bi][f1 + layout.blocks[bi].kmax[0],
                               f2 + layout.blocks[bi].kmax[1], d]
        row = (f1 + k1) * (2 * k2 + 1) + (f2 + k2)
        a[row, col] = beta * x
    return a


def dense_normal_matrix(layout, samples, reg):
    """Loop-built (A^H G A + W^H W) for small systems."""
    n = layout.size
    out = np.zeros((n, n), dtype=np.complex128)
    for sample in samples:
        a = dense_data_matrix(layout, sample)
        out += sample.weight * (a.conj().T @ a)
    out += dense_reg_gram(layout, reg)
    return out


def dense_reg_gram(layout, reg):
    """W^H W assembled entry-by-entry from the convolution definition."""
    entries = vector_index_map(layout)
    n = len(entries)
    gram = np.zeros((n, n), dtype=np.complex128)
    for i, (mi, bi, i1, i2, di) in enumerate(entries):
        for j, (mj, bj, j1, j2, dj) in enumerate(entries):
            if mi != mj or bi != bj or di != dj:
                continue
            w = reg.kernels[mi]
            s1 = (w.shape[0] - 1) // 2
            s2 = (w.shape[1] - 1) // 2
            k1, k2 = layout.blocks[bi].kmax
            acc = 0.0 + 0.0j
            for u1 in range(-(k1 + s1), k1 + s1 + 1):
                for u2 in range(-(k2 + s2), k2 + s2 + 1):
                    d1i, d2i = u1 - i1, u2 - i2
                    d1j, d2j = u1 - j1, u2 - j2
                    if (abs(d1i) <= s1 and abs(d2i) <= s2 and
                            abs(d1j) <= s1 and abs(d2j) <= s2):
                        acc += np.conj(w[d1j + s1, d2j + s2]) * w[d1i + s1, d2i + s2]
            gram[j, i] = acc
    return gram


def dense_rhs(layout, samples):
    out = np.zeros(layout.size, dtype=np.complex128)
    for sample in samples:
        a = dense_data_matrix(layout, sample)
        out += sample.weight * (a.conj().T @ sample.label.ravel())
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
