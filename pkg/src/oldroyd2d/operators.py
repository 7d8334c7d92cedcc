"""Fourier-multiplier operators: projection, fractional Laplacian powers,
the divergence-free stress reduction, frequency splitting, and norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import SpectralVectorField, SymmetricTensorField
from .grid import Grid


class ZeroModeSingularityError(ValueError):
    """Negative multiplier power applied to a field with nonzero mean."""


def leray_project_arrays(grid: Grid, v_hat: np.ndarray) -> np.ndarray:
    """Apply I - xi xi^T / |xi|^2 mode-wise; the xi = 0 mode passes through."""
    kx, ky, k_sq = grid.kx, grid.ky, grid.k_sq
    denom = k_sq.copy()
    denom[0, 0] = 1.0  # mean mode untouched (numerator is 0 there anyway)
    scale = (kx * v_hat[0] + ky * v_hat[1]) / denom
    out = np.empty_like(v_hat)
    out[0] = v_hat[0] - kx * scale
    out[1] = v_hat[1] - ky * scale
    return out


def leray_project(v: SpectralVectorField) -> SpectralVectorField:
    return SpectralVectorField(v.grid, leray_project_arrays(v.grid, v.data))


def lambda_power(grid: Grid, f_hat: np.ndarray, s: float) -> np.ndarray:
    """Multiply each coefficient by |xi|^s.

    For s > 0 the xi = 0 coefficient is set to 0.  For s < 0 the input must be
    zero-mean (the symbol is singular at xi = 0); otherwise a
    ZeroModeSingularityError is raised.
    """
    f_hat = np.asarray(f_hat, dtype=np.complex128)
    if s == 0:
        return f_hat.copy()
    if s < 0:
        dc = np.abs(f_hat[..., 0, 0])
        tol = 1e-12 * (1.0 + float(np.max(np.abs(f_hat))))
        if np.any(dc > tol):
            raise ZeroModeSingularityError(
                "zero-mode singularity: |xi|^s with s < 0 needs a zero-mean field"
            )
        mult = grid.k_mag.copy()
        mult[0, 0] = 1.0
        out = f_hat * mult**s
    else:
        out = f_hat * grid.k_mag**s
    out[..., 0, 0] = 0.0
    return out


def sigma_from_tau(tau: SymmetricTensorField) -> SpectralVectorField:
    """Divergence-free reduction of the stress: project its divergence and
    remove one wavenumber factor, mode-wise.

    Component formula: sigma_j = i (delta_jk - xi_j xi_k/|xi|^2) (xi_l/|xi|) tau_kl,
    with sigma(0) = 0 by convention.
    """
    grid = tau.grid
    kx, ky = grid.kx, grid.ky
    t11, t12, t22 = tau.data
    div = np.empty_like(tau.data[:2])
    div[0] = 1j * (kx * t11 + ky * t12)
    div[1] = 1j * (kx * t12 + ky * t22)
    div = leray_project_arrays(grid, div)
    inv_mag = grid.k_mag.copy()
    inv_mag[0, 0] = 1.0
    out = div / inv_mag
    out[..., 0, 0] = 0.0
    return SpectralVectorField(grid, out)


def _bump(s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


@dataclass(frozen=True)
class FrequencyCutoff:
    """Smooth radial cutoff: 1 on |xi| <= R/2, 0 on |xi| >= R.

    The bridge on [R/2, R] is the standard exponential bump quotient
    psi(R - r) / (psi(R - r) + psi(r - R/2)) with psi(s) = exp(-1/s) for s > 0.
    """

    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("cutoff radius must be positive")

    def profile(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        a = _bump(self.radius - r)
        b = _bump(r - 0.5 * self.radius)
        return a / (a + b)

    def low_weight(self, grid: Grid) -> np.ndarray:
        return _low_weight_cached(grid.n, grid.L, self.radius)


@lru_cache(maxsize=64)
def _low_weight_cached(n: int, L: float, radius: float) -> np.ndarray:
    grid = Grid(n, L)
    w = FrequencyCutoff(radius).profile(grid.k_mag)
    w.setflags(write=False)
    return w


def freq_split(grid: Grid, f_hat: np.ndarray, cut: FrequencyCutoff, squared: bool = False):
    """Split a spectrum into (low, high) parts that sum back exactly.

    Default: low = phi0 * f, high = f - low.  With squared=True the high part
    carries the squared complement (1 - phi0)^2 and low is the remainder.
    """
    f_hat = np.asarray(f_hat, dtype=np.complex128)
    w = cut.low_weight(grid)
    if squared:
        high = (1.0 - w) ** 2 * f_hat
        low = f_hat - high
    else:
        low = w * f_hat
        high = f_hat - low
    return low, high


#: Frobenius multiplicities for the stored symmetric-tensor components
#: (the off-diagonal entry appears twice in the full matrix).
TENSOR_WEIGHTS = (1.0, 2.0, 1.0)


def sobolev_norm(grid: Grid, f_hat: np.ndarray, k: int, component_weights=None) -> float:
    """Homogeneous norm (sum over modes of |xi|^{2k} |f_hat|^2)^(1/2).

    Components of a stacked array are summed, optionally with per-component
    multiplicities (pass TENSOR_WEIGHTS for symmetric tensors so the result
    is the full-matrix Frobenius norm).  The reduction is numpy's pairwise
    sum in a fixed layout, so results do not depend on thread count.
    """
    if not 0 <= k <= 4:
        raise ValueError("derivative order k must be in 0..4")
    f_hat = np.asarray(f_hat)
    mag2 = np.abs(f_hat) ** 2
    if mag2.ndim == 3:
        if component_weights is not None:
            w = np.asarray(component_weights, dtype=np.float64)
            mag2 = np.tensordot(w, mag2, axes=(0, 0))
        else:
            mag2 = mag2.sum(axis=0)
    if k:
        mag2 = mag2 * grid.k_sq**k
    return float(math.sqrt(np.sum(mag2)))


def tensor_sobolev_norm(grid: Grid, tau_hat: np.ndarray, k: int) -> float:
    """Homogeneous norm of a symmetric tensor stored as (11, 12, 22)."""
    return sobolev_norm(grid, tau_hat, k, TENSOR_WEIGHTS)


def hk_norm(grid: Grid, f_hat: np.ndarray, k: int, component_weights=None) -> float:
    """Inhomogeneous norm: root of the sum of the homogeneous pieces 0..k."""
    return float(
        math.sqrt(
            sum(sobolev_norm(grid, f_hat, j, component_weights) ** 2 for j in range(k + 1))
        )
    )


def l2_inner(f_hat: np.ndarray, g_hat: np.ndarray) -> float:
    """Real L2 pairing of two spectra (components summed)."""
    return float(np.sum(f_hat * np.conj(g_hat)).real)


def physical_l2(f: np.ndarray) -> float:
    """Mean-square norm of a physical field; matches the spectral sum (Parseval).

    Stacked components are summed; the normalization is by grid points only.
    """
    f = np.asarray(f)
    npts = f.shape[-1] * f.shape[-2]
    return float(math.sqrt(np.sum(np.abs(f) ** 2) / npts))
