"""Square periodic grid and unitary Fourier transforms.

Spectra are stored as full complex arrays in numpy FFT layout.  The
forward transform returns Fourier coefficients (the mode at xi = 0 is
the field mean), so Parseval reads: mean-square of the physical field
equals the plain sum of squared coefficient moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi

# Default period: a long torus so the discrete wavenumbers sample the
# low-frequency range finely (spacing 1/64 with the default grids).
DEFAULT_PERIOD = TWO_PI * 64.0


@lru_cache(maxsize=64)
def _integer_modes(n: int) -> np.ndarray:
    # signed integer frequencies 0, 1, ..., n/2-1, -n/2, ..., -1
    j = np.fft.fftfreq(n, d=1.0 / n)
    j.setflags(write=False)
    return j


@lru_cache(maxsize=64)
def _wavenumbers(n: int, L: float):
    k = _integer_modes(n) * (TWO_PI / L)
    kx = k[:, None].copy()
    ky = k[None, :].copy()
    k_sq = kx * kx + ky * ky
    k_mag = np.sqrt(k_sq)
    for a in (kx, ky, k_sq, k_mag):
        a.setflags(write=False)
    return kx, ky, k_sq, k_mag


@lru_cache(maxsize=64)
def _dealias_mask(n: int, fraction: float) -> np.ndarray:
    j = _integer_modes(n)
    keep = np.abs(j) < fraction * (n / 2.0)
    mask = keep[:, None] & keep[None, :]
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=64)
def _half_multipliers(n: int, L: float, fraction: float):
    # half-spectrum (rfft2) views of ikx, iky and the dealias mask, used by
    # the physical-product pipeline
    m = n // 2 + 1
    kx, ky, _, _ = _wavenumbers(n, L)
    mask = _dealias_mask(n, fraction)[:, :m]
    ikx = (1j * kx) * np.ones((1, m))
    iky = 1j * ky[:, :m] * np.ones((n, 1))
    for a in (ikx, iky):
        a.setflags(write=False)
    return ikx, iky, mask


@dataclass(frozen=True)
class Grid:
    """n-by-n periodic grid of side L."""

    n: int
    L: float = DEFAULT_PERIOD

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError("grid size n must be even and >= 8")
        if not self.L > 0.0:
            raise ValueError("period L must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def kx(self) -> np.ndarray:
        return _wavenumbers(self.n, self.L)[0]

    @property
    def ky(self) -> np.ndarray:
        return _wavenumbers(self.n, self.L)[1]

    @property
    def k_sq(self) -> np.ndarray:
        return _wavenumbers(self.n, self.L)[2]

    @property
    def k_mag(self) -> np.ndarray:
        return _wavenumbers(self.n, self.L)[3]

    @property
    def k_max(self) -> float:
        """Largest resolved wavenumber magnitude per axis."""
        return (TWO_PI / self.L) * (self.n // 2)

    def points(self):
        """Physical coordinates (x, y) as two (n, n) arrays."""
        x = np.arange(self.n) * (self.L / self.n)
        return np.meshgrid(x, x, indexing="ij")

    def forward(self, f: np.ndarray) -> np.ndarray:
        """Physical field -> Fourier coefficients."""
        f = np.asarray(f)
        if f.shape[-2:] != self.shape:
            raise ValueError(f"field shape {f.shape} does not match grid {self.shape}")
        return np.fft.fft2(f) / (self.n * self.n)

    def inverse(self, f_hat: np.ndarray, real: bool = True) -> np.ndarray:
        """Fourier coefficients -> physical field."""
        f_hat = np.asarray(f_hat)
        if f_hat.shape[-2:] != self.shape:
            raise ValueError(f"spectrum shape {f_hat.shape} does not match grid {self.shape}")
        out = np.fft.ifft2(f_hat) * (self.n * self.n)
        return out.real if real else out

    def dealias_mask(self, fraction: float = 2.0 / 3.0) -> np.ndarray:
        """Boolean mask retaining integer modes with |j| < fraction*(n/2) per axis."""
        return _dealias_mask(self.n, float(fraction))


def reflect_modes(f_hat: np.ndarray) -> np.ndarray:
    """Coefficient array evaluated at -xi (per mode), i.e. A[j,k] -> A[-j,-k]."""
    return np.roll(np.flip(f_hat, axis=(-2, -1)), shift=1, axis=(-2, -1))


def hermitianize(f_hat: np.ndarray) -> np.ndarray:
    """Project onto spectra of real fields: average with the conjugate at -xi."""
    return 0.5 * (f_hat + np.conj(reflect_modes(f_hat)))


def hermitian_defect(f_hat: np.ndarray) -> float:
    """Max |f_hat(xi) - conj(f_hat(-xi))| over all modes and components."""
    return float(np.max(np.abs(f_hat - np.conj(reflect_modes(f_hat)))))
