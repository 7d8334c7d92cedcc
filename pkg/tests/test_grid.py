"""Transforms, wavenumbers, and hermitian-symmetry utilities."""

import math

import numpy as np
import pytest

from oldroyd2d.grid import Grid, hermitian_defect, hermitianize, reflect_modes

TWO_PI = 2.0 * math.pi


class TestGridConstruction:
    def test_valid(self):
        g = Grid(16, 2.0 * math.pi)
        assert g.shape == (16, 16)
        assert g.k_max == pytest.approx(8.0)

    @pytest.mark.parametrize("n", [6, 15, 0, -8])
    def test_bad_n(self, n):
        with pytest.raises(ValueError):
            Grid(n)

    def test_bad_period(self):
        with pytest.raises(ValueError):
            Grid(16, 0.0)

    def test_wavenumber_magnitudes(self):
        g = Grid(16, 4.0)
        scale = TWO_PI / 4.0
        assert g.k_mag[0, 0] == 0.0
        assert g.k_mag[1, 0] == pytest.approx(scale)
        assert g.k_mag[3, 2] == pytest.approx(scale * math.sqrt(13.0))
        # point count
        assert g.points()[0].size == 16 * 16


class TestTransforms:
    def test_dc_mode(self):
        g = Grid(16, 2.0 * math.pi)
        f_hat = g.forward(np.ones(g.shape))
        assert f_hat[0, 0] == pytest.approx(1.0)
        off = np.abs(f_hat).sum() - abs(f_hat[0, 0])
        assert off < 1e-13

    def test_single_harmonic(self):
        g = Grid(32, 5.0)
        x, _ = g.points()
        f_hat = g.forward(np.cos(TWO_PI * x / g.L))
        assert f_hat[1, 0] == pytest.approx(0.5, abs=1e-14)
        assert f_hat[-1, 0] == pytest.approx(0.5, abs=1e-14)
        back = g.inverse(f_hat)
        assert np.max(np.abs(back - np.cos(TWO_PI * x / g.L))) < 1e-13

    def test_random_roundtrip(self):
        g = Grid(32)
        rng = np.random.default_rng(0)
        f = rng.standard_normal(g.shape)
        back = g.inverse(g.forward(f))
        assert np.max(np.abs(back - f)) / np.max(np.abs(f)) < 1e-12

    def test_forward_of_real_is_hermitian(self):
        g = Grid(16)
        rng = np.random.default_rng(1)
        f_hat = g.forward(rng.standard_normal(g.shape))
        assert hermitian_defect(f_hat) < 1e-15

    def test_dimension_mismatch(self):
        g = Grid(16)
        with pytest.raises(ValueError):
            g.forward(np.ones((8, 8)))
        with pytest.raises(ValueError):
            g.inverse(np.ones((8, 16), dtype=complex))


class TestHermitianTools:
    def test_reflect_involution(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        assert np.array_equal(reflect_modes(reflect_modes(a)), a)

    def test_hermitianize_projects(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        h = hermitianize(a)
        assert hermitian_defect(h) < 1e-15
        # idempotent
        assert np.max(np.abs(hermitianize(h) - h)) < 1e-16
        # hermitian spectra invert to real fields
        g = Grid(16)
        phys = g.inverse(h, real=False)
        assert np.max(np.abs(phys.imag)) < 1e-13 * max(1.0, np.max(np.abs(phys.real)))


class TestDealiasMask:
    def test_two_thirds_band(self):
        g = Grid(128)
        mask = g.dealias_mask()
        j = np.fft.fftfreq(128, d=1.0 / 128)
        kept = np.abs(j[mask[:, 0]])
        assert kept.max() == 42  # strictly below 2/3 * 64
        assert mask[0, 0]

    def test_full_fraction_drops_nyquist(self):
        g = Grid(16)
        mask = g.dealias_mask(1.0)
        assert not mask[8, 0]  # the -n/2 column is never kept
        assert mask[7, 7]
