"""Projection, multiplier powers, the stress reduction, frequency splitting,
and norms, including the randomized structural property suite."""

import math

import numpy as np
import pytest

from oldroyd2d.fields import SpectralVectorField, SymmetricTensorField
from oldroyd2d.grid import Grid, hermitianize
from oldroyd2d.operators import (
    FrequencyCutoff,
    TENSOR_WEIGHTS,
    ZeroModeSingularityError,
    freq_split,
    hk_norm,
    l2_inner,
    lambda_power,
    leray_project,
    leray_project_arrays,
    physical_l2,
    sigma_from_tau,
    sobolev_norm,
    tensor_sobolev_norm,
)


def random_vector(grid, seed, divergence_free=False):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((2, grid.n, grid.n)) + 1j * rng.standard_normal(
        (2, grid.n, grid.n)
    )
    data = hermitianize(data)
    if divergence_free:
        data = leray_project_arrays(grid, data)
    return SpectralVectorField(grid, data)


def random_tensor(grid, seed):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((3, grid.n, grid.n)) + 1j * rng.standard_normal(
        (3, grid.n, grid.n)
    )
    return SymmetricTensorField(grid, hermitianize(data))


class TestLerayProjection:
    def test_annihilates_gradients(self):
        g = Grid(16)
        grad = SpectralVectorField(g, np.stack([g.kx + 0j * g.ky, g.ky + 0j * g.kx]))
        out = leray_project(grad)
        nonzero = out.data.copy()
        nonzero[:, 0, 0] = 0.0
        assert np.max(np.abs(nonzero)) < 1e-14

    def test_fixes_divergence_free(self):
        g = Grid(16)
        v = SpectralVectorField(g, np.stack([-g.ky + 0j * g.kx, g.kx + 0j * g.ky]))
        out = leray_project(v)
        assert np.max(np.abs(out.data - v.data)) < 1e-14

    def test_hand_values(self):
        g = Grid(16, 2.0 * math.pi)
        v = np.zeros((2, 16, 16), dtype=complex)
        v[0, 1, 0] = 1.0  # unit x-amplitude at xi = (1, 0)
        v[0, 0, 1] = 1.0  # and at xi = (0, 1)
        out = leray_project_arrays(g, v)
        assert abs(out[0, 1, 0]) < 1e-15 and abs(out[1, 1, 0]) < 1e-15
        assert out[0, 0, 1] == pytest.approx(1.0) and abs(out[1, 0, 1]) < 1e-15

    def test_mean_mode_passes_through(self):
        g = Grid(16)
        v = np.zeros((2, 16, 16), dtype=complex)
        v[:, 0, 0] = [2.0, -3.0]
        out = leray_project_arrays(g, v)
        assert out[0, 0, 0] == 2.0 and out[1, 0, 0] == -3.0

    def test_idempotent_and_nonexpansive(self):
        g = Grid(32)
        v = random_vector(g, 11)
        once = leray_project(v)
        twice = leray_project(once)
        assert np.max(np.abs(twice.data - once.data)) < 1e-14 * np.max(np.abs(v.data))
        # mode-wise norm never grows
        before = np.abs(v.data[0]) ** 2 + np.abs(v.data[1]) ** 2
        after = np.abs(once.data[0]) ** 2 + np.abs(once.data[1]) ** 2
        assert np.all(after <= before * (1.0 + 1e-12) + 1e-300)


class TestLambdaPower:
    def test_zero_power_is_identity(self):
        g = Grid(16)
        f = random_vector(g, 0).data[0]
        assert np.array_equal(lambda_power(g, f, 0.0), f)

    def test_laplacian_multiplier(self):
        g = Grid(16, 2.0 * math.pi)
        f = np.zeros((16, 16), dtype=complex)
        f[3, 0] = 1.0  # |xi| = 3
        out = lambda_power(g, f, 2.0)
        assert out[3, 0] == pytest.approx(9.0)

    def test_negative_roundtrip_on_zero_mean(self):
        g = Grid(16)
        f = random_vector(g, 5).data[0].copy()
        f[0, 0] = 0.0
        back = lambda_power(g, lambda_power(g, f, -1.0), 1.0)
        assert np.max(np.abs(back - f)) < 1e-12 * np.max(np.abs(f))

    def test_zero_mode_singularity(self):
        g = Grid(16)
        f = np.ones((16, 16), dtype=complex)
        with pytest.raises(ZeroModeSingularityError):
            lambda_power(g, f, -1.0)


class TestSigmaFromTau:
    def test_identity_tensor_is_annihilated(self):
        g = Grid(16, 2.0 * math.pi)
        tau = np.zeros((3, 16, 16), dtype=complex)
        tau[0, 1, 0] = 1.0  # tau_11 at xi = (1, 0)
        tau[2, 1, 0] = 1.0  # tau_22
        sigma = sigma_from_tau(SymmetricTensorField(g, tau))
        assert np.max(np.abs(sigma.data[:, 1, 0])) < 1e-15

    def test_offdiagonal_hand_value(self):
        g = Grid(16, 2.0 * math.pi)
        tau = np.zeros((3, 16, 16), dtype=complex)
        tau[1, 1, 0] = 1.0  # tau_12 = tau_21 at xi = (1, 0)
        sigma = sigma_from_tau(SymmetricTensorField(g, tau))
        assert abs(sigma.data[0, 1, 0]) < 1e-15
        assert sigma.data[1, 1, 0] == pytest.approx(1j)

    def test_zero_maps_to_zero(self):
        g = Grid(16)
        sigma = sigma_from_tau(SymmetricTensorField.zeros(g))
        assert np.max(np.abs(sigma.data)) == 0.0

    def test_output_divergence_free_and_bounded(self):
        g = Grid(32)
        tau = random_tensor(g, 21)
        sigma = sigma_from_tau(tau)
        assert sigma.is_divergence_free()
        amp = np.sqrt(np.abs(sigma.data[0]) ** 2 + np.abs(sigma.data[1]) ** 2)
        bound = np.sqrt(tau.frobenius_sq())
        assert np.all(amp <= bound * (1.0 + 1e-12) + 1e-300)


class TestFrequencyCutoff:
    def test_plateau_support_and_midpoint(self):
        cut = FrequencyCutoff(2.0)
        r = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
        phi = cut.profile(r)
        assert phi[0] == 1.0 and phi[1] == 1.0 and phi[2] == 1.0
        assert phi[4] == 0.0 and phi[5] == 0.0
        # the bump quotient is exactly 1/2 at the symmetric midpoint 3R/4
        assert cut.profile(np.array([1.5]))[0] == pytest.approx(0.5)

    def test_monotone_bridge(self):
        cut = FrequencyCutoff(1.0)
        r = np.linspace(0.0, 1.2, 500)
        phi = cut.profile(r)
        assert np.all(np.diff(phi) <= 1e-15)
        assert np.all((phi >= 0.0) & (phi <= 1.0))

    def test_split_flat_and_outside_modes(self):
        g = Grid(32, 2.0 * math.pi)
        cut = FrequencyCutoff(4.0)
        f = np.zeros((32, 32), dtype=complex)
        f[1, 0] = 1.0  # |xi| = 1 = R/4: flat region
        low, high = freq_split(g, f, cut)
        assert low[1, 0] == 1.0 and high[1, 0] == 0.0
        f2 = np.zeros_like(f)
        f2[8, 0] = 1.0  # |xi| = 8 = 2R: outside support
        low2, high2 = freq_split(g, f2, cut)
        assert low2[8, 0] == 0.0 and high2[8, 0] == 1.0

    def test_split_bridge_weights(self):
        g = Grid(32, 2.0 * math.pi)
        cut = FrequencyCutoff(4.0)
        f = np.zeros((32, 32), dtype=complex)
        f[3, 0] = 1.0  # |xi| = 3 = 3R/4
        low, high = freq_split(g, f, cut)
        assert low[3, 0] == pytest.approx(0.5)
        assert high[3, 0] == pytest.approx(0.5)
        assert low[3, 0] + high[3, 0] == pytest.approx(1.0, abs=1e-15)

    def test_squared_variant_partition(self):
        g = Grid(32)
        cut = FrequencyCutoff(0.3)
        f = random_vector(g, 30).data
        low, high = freq_split(g, f, cut, squared=True)
        assert np.max(np.abs(low + high - f)) <= 1e-15 * np.max(np.abs(f))
        w = cut.low_weight(g)
        assert np.max(np.abs(high - (1.0 - w) ** 2 * f)) < 1e-15 * np.max(np.abs(f))


class TestNorms:
    def test_single_mode_multiplier(self):
        g = Grid(16, 2.0 * math.pi)
        f = np.zeros((16, 16), dtype=complex)
        f[2, 0] = 1.0  # |xi| = 2
        assert sobolev_norm(g, f, 1) == pytest.approx(2.0)
        assert sobolev_norm(g, np.zeros_like(f), 3) == 0.0

    def test_h1_identity(self):
        g = Grid(32)
        f = random_vector(g, 40).data[0]
        grad = np.stack([1j * g.kx * f, 1j * g.ky * f])
        lhs = hk_norm(g, f, 1) ** 2
        rhs = sobolev_norm(g, f, 0) ** 2 + sobolev_norm(g, grad, 0) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_monotonicity_in_k(self):
        g = Grid(32, 2.0 * math.pi)
        hi = np.zeros((32, 32), dtype=complex)
        hi[2, 3] = 1.0
        hi[5, 1] = 0.5
        lo = np.zeros_like(hi)
        lo[1, 0] = 1.0  # exactly |xi| = 1 boundary is non-decreasing
        lo[0, 0] = 0.3
        up = [sobolev_norm(g, hi, k) for k in range(5)]
        down = [sobolev_norm(g, lo, k) for k in range(5)]
        assert all(b >= a for a, b in zip(up, up[1:]))
        assert all(b <= a for a, b in zip(down, down[1:]))

    def test_order_bound(self):
        g = Grid(16)
        with pytest.raises(ValueError):
            sobolev_norm(g, np.zeros(g.shape, dtype=complex), 5)

    def test_tensor_weights_count_offdiagonal_twice(self):
        g = Grid(16)
        tau = np.zeros((3, 16, 16), dtype=complex)
        tau[1, 2, 1] = 1.0
        assert tensor_sobolev_norm(g, tau, 0) == pytest.approx(math.sqrt(2.0))
        assert np.allclose(TENSOR_WEIGHTS, (1.0, 2.0, 1.0))


class TestParsevalProperty:
    @pytest.mark.parametrize("n", [16, 32, 64])
    def test_parseval_many_fields(self, n):
        g = Grid(n)
        for seed in range(34):
            rng = np.random.default_rng(1000 * n + seed)
            f = rng.standard_normal(g.shape)
            spectral = sobolev_norm(g, g.forward(f), 0)
            assert abs(spectral - physical_l2(f)) <= 1e-12 * physical_l2(f)

    def test_inner_product_matches_physical(self):
        g = Grid(32)
        rng = np.random.default_rng(77)
        f = rng.standard_normal(g.shape)
        h = rng.standard_normal(g.shape)
        spec = l2_inner(g.forward(f), g.forward(h))
        phys = float(np.mean(f * h))
        assert spec == pytest.approx(phys, rel=1e-12, abs=1e-15)
