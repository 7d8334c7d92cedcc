"""Backend dispatch and cross-backend agreement of the hot kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from oldroyd2d import kernels


class TestBackendSelection:
    def test_backend_reports_a_known_name(self):
        assert kernels.backend() in ("numba", "numpy")

    def test_env_flag_forces_numpy(self):
        code = "from oldroyd2d import kernels; print(kernels.backend())"
        env = dict(os.environ, OLDROYD2D_PURE_NUMPY="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.returncode == 0
        assert out.stdout.strip() == "numpy"


@pytest.mark.skipif(not kernels._HAVE_NUMBA, reason="numba backend unavailable")
class TestCrossBackendAgreement:
    def test_green_table_matches(self):
        xi = np.linspace(0.0, 3.0, 4001)  # spans real, double-root, oscillatory
        for t in (0.0, 0.3, 2.0, 25.0, 200.0):
            jit = kernels._green_numba(1.0, 1.0, 1.0, 0.01, xi, t)
            ref = kernels._green_numpy(1.0, 1.0, 1.0, 0.01, xi, t)
            for a, b in zip(jit, ref):
                assert np.max(np.abs(a - b)) < 1e-14

    def test_rk4_matches(self):
        xi = np.linspace(0.0, 1.0, 64)
        u0 = np.exp(1j * xi).astype(np.complex128)
        s0 = (0.3 - 0.2j) * np.ones_like(u0)
        jit = kernels._rk4_numba(1.0, 1.0, 1.0, 0.0, xi, u0, s0, 3.0, 500)
        ref = kernels._rk4_numpy(1.0, 1.0, 1.0, 0.0, xi, u0, s0, 3.0, 500)
        for a, b in zip(jit, ref):
            assert np.max(np.abs(a - b)) < 1e-13


class TestKernelContracts:
    def test_green_scalar_input(self):
        g1, g2, g3 = kernels.green_table(1.0, 1.0, 1.0, 0.0, 0.5, 0.0)
        assert (g1[0], g2[0], g3[0]) == (0.0, 1.0, 1.0)

    def test_green_no_overflow_at_long_times(self):
        xi = np.linspace(0.0, 0.5, 101)
        g1, g2, g3 = kernels.green_table(1.0, 1.0, 1.0, 0.0, xi, 1e4)
        assert np.all(np.isfinite(g1) & np.isfinite(g2) & np.isfinite(g3))
        assert np.all(np.abs(g1) <= 2.0)

    def test_rk4_rejects_bad_steps(self):
        with pytest.raises(ValueError):
            kernels.rk4_evolve(1.0, 1.0, 1.0, 0.0, [0.1], [1.0], [0.0], 1.0, 0)
