import numpy as np
import pytest

from deformdcf import spectral as sp
from deformdcf.errors import DimensionError, DomainError

from conftest import random_layout, random_real_symmetric


def oversampled_grid_oracle(s, factor=4):
    """Independent inverse-DFT evaluation on an oversampled grid."""
    k1, k2 = s.layout.kmax
    g1 = factor * (2 * k1 + 1)
    g2 = factor * (2 * k2 + 1)
    vals = np.zeros((g1, g2), dtype=np.complex128)
    for i1, f1 in enumerate(range(-k1, k1 + 1)):
        for i2, f2 in enumerate(range(-k2, k2 + 1)):
            vals[f1 % g1, f2 % g2] += s.coeffs[i1, i2]
    return np.fft.ifft2(vals).real * (g1 * g2)


class TestLayoutAndSpectrum:
    def test_layout_validation(self):
        with pytest.raises(ValueError):
            sp.SpectrumLayout((0.0, 4.0), (2, 2))
        with pytest.raises(ValueError):
            sp.SpectrumLayout((4.0, 4.0), (-1, 2))

    def test_coefficient_count(self):
        lay = sp.SpectrumLayout((6.0, 8.0), (3, 5))
        assert lay.shape == (7, 11)

    def test_spectrum_shape_mismatch(self):
        lay = sp.SpectrumLayout((6.0, 6.0), (2, 2))
        with pytest.raises(DimensionError):
            sp.Spectrum(lay, np.zeros((3, 3)))

    def test_coeffs_are_immutable(self):
        s = sp.zeros(sp.SpectrumLayout((6.0, 6.0), (2, 2)))
        with pytest.raises(ValueError):
            s.coeffs[0, 0] = 1.0


class TestInterpolate:
    def test_constant_grid_has_only_dc(self):
        lay = sp.SpectrumLayout((8.0, 8.0), (3, 3))
        ker = sp.cubic_kernel(lay, (8, 8))
        s = sp.interpolate(np.full((8, 8), 5.0), ker, lay)
        dc = 5.0 * 64 * ker.spectrum.coeffs[3, 3]
        assert abs(s.coeffs[3, 3] - dc) < 1e-12
        off = s.coeffs.copy()
        off[3, 3] = 0.0
        assert np.max(np.abs(off)) < 1e-12
        assert sp.is_real_symmetric(s)

    def test_single_sample_is_kernel_times_value(self):
        lay = sp.SpectrumLayout((1.0, 1.0), (4, 4))
        ker = sp.cubic_kernel(lay, (1, 1))
        v = -2.75
        s = sp.interpolate(np.array([[v]]), ker, lay)
        assert np.allclose(s.coeffs, v * ker.spectrum.coeffs, atol=1e-14)

    def test_matches_spatial_interpolation_oracle(self, rng):
        n = 8
        lay = sp.SpectrumLayout((float(n), float(n)), (n // 2, n // 2))
        ker = sp.cubic_kernel(lay, (n, n))
        x = rng.uniform(-1.0, 1.0, size=(n, n))
        s = sp.interpolate(x, ker, lay)

        # spatial oracle: sum_n x[n] * b(t - n*step) with the bandlimited
        # kernel synthesized by direct summation of its series
        def kernel_value(u1, u2):
            acc = 0.0
            for i1, f1 in enumerate(lay.freqs(0)):
                for i2, f2 in enumerate(lay.freqs(1)):
                    acc += (ker.spectrum.coeffs[i1, i2] *
                            np.exp(2j * np.pi * (f1 * u1 / n + f2 * u2 / n))).real
            return acc

        for node in [(0, 0), (3, 5), (7, 1)]:
            direct = 0.0
            for n1 in range(n):
                for n2 in range(n):
                    direct += x[n1, n2] * kernel_value(node[0] - n1, node[1] - n2)
            assert abs(sp.evaluate(s, (float(node[0]), float(node[1]))) - direct) < 1e-9

    def test_dimension_mismatch(self, rng):
        lay = sp.SpectrumLayout((8.0, 8.0), (4, 4))
        ker = sp.cubic_kernel(lay, (8, 8))
        with pytest.raises(DimensionError):
            sp.interpolate(np.zeros((6, 8)), ker, lay)
        other = sp.SpectrumLayout((8.0, 8.0), (3, 3))
        with pytest.raises(DimensionError):
            sp.interpolate(np.zeros((8, 8)), ker, other)


class TestEvaluate:
    def test_zero_spectrum(self):
        s = sp.zeros(sp.SpectrumLayout((5.0, 7.0), (3, 3)))
        assert sp.evaluate(s, (1.23, -4.5)) == 0.0

    def test_dc_only(self):
        lay = sp.SpectrumLayout((5.0, 7.0), (2, 2))
        c = np.zeros(lay.shape, dtype=complex)
        c[2, 2] = 3.5
        s = sp.Spectrum(lay, c)
        for t in [(0.0, 0.0), (1.0, 2.0), (-3.3, 12.0)]:
            assert abs(sp.evaluate(s, t) - 3.5) < 1e-12

    def test_matches_oversampled_inverse_dft(self, rng):
        lay = sp.SpectrumLayout((6.0, 9.0), (3, 3))
        s = random_real_symmetric(rng, lay)
        grid = oversampled_grid_oracle(s, factor=4)
        g1, g2 = grid.shape
        pts = np.array([[i * 6.0 / g1, j * 9.0 / g2]
                        for i in range(g1) for j in range(g2)])
        vals = sp.evaluate(s, pts).reshape(g1, g2)
        assert np.max(np.abs(vals - grid)) < 1e-10

    def test_rejects_asymmetric(self, rng):
        lay = sp.SpectrumLayout((6.0, 6.0), (2, 2))
        c = rng.normal(size=lay.shape) + 1j * rng.normal(size=lay.shape)
        with pytest.raises(DomainError):
            sp.evaluate(sp.Spectrum(lay, c), (0.0, 0.0))


class TestShift:
    def test_zero_shift_identity(self, rng):
        lay = random_layout(rng)
        s = random_real_symmetric(rng, lay)
        assert np.array_equal(sp.shift(s, (0.0, 0.0)).coeffs, s.coeffs)

    def test_full_period_shift(self, rng):
        lay = sp.SpectrumLayout((6.5, 4.25), (4, 4))
        s = random_real_symmetric(rng, lay)
        out = sp.shift(s, lay.period)
        assert np.max(np.abs(out.coeffs - s.coeffs)) < 1e-12

    def test_shift_theorem(self, rng):
        lay = random_layout(rng)
        s = random_real_symmetric(rng, lay)
        p = (1.3, -0.7)
        ts = rng.uniform(-10, 10, size=(20, 2))
        lhs = sp.evaluate(sp.shift(s, p), ts)
        rhs = sp.evaluate(s, ts - np.asarray(p))
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1 + np.max(np.abs(rhs)))

    def test_group_law(self, rng):
        for _ in range(10):
            lay = random_layout(rng)
            s = random_real_symmetric(rng, lay)
            p = rng.uniform(-5, 5, size=2)
            q = rng.uniform(-5, 5, size=2)
            twice = sp.shift(sp.shift(s, p), q)
            once = sp.shift(s, p + q)
            assert np.max(np.abs(twice.coeffs - once.coeffs)) < 1e-12 * (
                1 + np.max(np.abs(s.coeffs)))

    def test_preserves_real_symmetry(self, rng):
        lay = random_layout(rng)
        s = random_real_symmetric(rng, lay)
        assert sp.is_real_symmetric(sp.shift(s, (0.37, -2.21)), tol=1e-12)


class TestInnerNorm:
    def test_zero_norm(self):
        s = sp.zeros(sp.SpectrumLayout((4.0, 4.0), (2, 2)))
        assert sp.norm2(s) == 0.0

    def test_orthogonal_single_modes(self):
        lay = sp.SpectrumLayout((4.0, 4.0), (2, 2))
        a = np.zeros(lay.shape, dtype=complex)
        b = np.zeros(lay.shape, dtype=complex)
        a[2 + 1, 2] = 1.0
        a[2 - 1, 2] = 1.0
        b[2, 2 + 2] = 1.0j
        b[2, 2 - 2] = -1.0j
        assert sp.inner(sp.Spectrum(lay, a), sp.Spectrum(lay, b)) == 0.0

    def test_parseval_quadrature(self, rng):
        lay = sp.SpectrumLayout((5.0, 8.0), (4, 4))
        s = random_real_symmetric(rng, lay)
        g = 64
        pts = np.array([[i * 5.0 / g, j * 8.0 / g]
                        for i in range(g) for j in range(g)])
        vals = sp.evaluate(s, pts)
        riemann = float(np.mean(vals**2))  # (1/(T1 T2)) * integral f^2
        assert abs(sp.norm2(s) - riemann) < 1e-4 * riemann

    def test_layout_mismatch(self, rng):
        a = sp.zeros(sp.SpectrumLayout((4.0, 4.0), (2, 2)))
        b = sp.zeros(sp.SpectrumLayout((4.0, 4.0), (3, 3)))
        with pytest.raises(DimensionError):
            sp.inner(a, b)


class TestPointwiseMul:
    def test_all_ones_filter(self, rng):
        lay = random_layout(rng)
        a = random_real_symmetric(rng, lay)
        ones = sp.Spectrum(lay, np.ones(lay.shape))
        assert np.array_equal(sp.pointwise_mul(a, ones).coeffs, a.coeffs)

    def test_zero_input(self, rng):
        lay = random_layout(rng)
        b = random_real_symmetric(rng, lay)
        z = sp.zeros(lay)
        assert np.all(sp.pointwise_mul(z, b).coeffs == 0)

    def test_scalar_loop_oracle(self, rng):
        lay = sp.SpectrumLayout((7.0, 7.0), (3, 3))
        a = random_real_symmetric(rng, lay)
        b = random_real_symmetric(rng, lay)
        out = sp.pointwise_mul(a, b)
        for i1 in range(7):
            for i2 in range(7):
                expect = complex(a.coeffs[i1, i2]) * complex(b.coeffs[i1, i2])
                assert abs(out.coeffs[i1, i2] - expect) < 1e-13
        assert sp.is_real_symmetric(out, tol=1e-12)


class TestGridValues:
    def test_requires_fine_grid(self, rng):
        lay = sp.SpectrumLayout((4.0, 4.0), (3, 3))
        s = random_real_symmetric(rng, lay)
        with pytest.raises(DimensionError):
            sp.grid_values(s, (5, 9))

    def test_matches_evaluate(self, rng):
        lay = sp.SpectrumLayout((4.0, 6.0), (2, 3))
        s = random_real_symmetric(rng, lay)
        g = sp.grid_values(s, (12, 16))
        pts = np.array([[i * 4.0 / 12, j * 6.0 / 16]
                        for i in range(12) for j in range(16)])
        assert np.max(np.abs(g.ravel() - sp.evaluate(s, pts))) < 1e-10
