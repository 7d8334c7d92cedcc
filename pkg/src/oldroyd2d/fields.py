"""Velocity and stress fields stored as complex mode arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, hermitian_defect, hermitianize

#: component order of the symmetric tensor storage
TENSOR_COMPONENTS = ("11", "12", "22")


def _check_shape(grid: Grid, data: np.ndarray, ncomp: int, what: str) -> np.ndarray:
    data = np.asarray(data, dtype=np.complex128)
    if data.shape != (ncomp, grid.n, grid.n):
        raise ValueError(f"{what} expects shape ({ncomp}, {grid.n}, {grid.n}), got {data.shape}")
    return data


@dataclass(frozen=True)
class SpectralVectorField:
    """Two-component vector field (velocity) as Fourier coefficients."""

    grid: Grid
    data: np.ndarray  # (2, n, n) complex

    def __post_init__(self):
        object.__setattr__(self, "data", _check_shape(self.grid, self.data, 2, "vector field"))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralVectorField":
        return cls(grid, np.zeros((2, grid.n, grid.n), dtype=np.complex128))

    @classmethod
    def from_physical(cls, grid: Grid, u1: np.ndarray, u2: np.ndarray) -> "SpectralVectorField":
        return cls(grid, np.stack([grid.forward(u1), grid.forward(u2)]))

    def to_physical(self):
        return self.grid.inverse(self.data[0]), self.grid.inverse(self.data[1])

    def hermitian_defect(self) -> float:
        return hermitian_defect(self.data)

    def divergence_defect(self) -> float:
        """Largest |xi . u_hat(xi)| measured against 1e-12 * |u_hat(xi)| + eps."""
        g = self.grid
        div = np.abs(g.kx * self.data[0] + g.ky * self.data[1])
        amp = np.sqrt(np.abs(self.data[0]) ** 2 + np.abs(self.data[1]) ** 2)
        return float(np.max(div - 1e-12 * amp))

    def is_divergence_free(self, slack: float = 1e-18) -> bool:
        return self.divergence_defect() <= slack

    def hermitianized(self) -> "SpectralVectorField":
        return SpectralVectorField(self.grid, hermitianize(self.data))


@dataclass(frozen=True)
class SymmetricTensorField:
    """Symmetric 2x2 tensor field (stress); only the 11, 12, 22 components are stored."""

    grid: Grid
    data: np.ndarray  # (3, n, n) complex, order (11, 12, 22)

    def __post_init__(self):
        object.__setattr__(self, "data", _check_shape(self.grid, self.data, 3, "tensor field"))

    @classmethod
    def zeros(cls, grid: Grid) -> "SymmetricTensorField":
        return cls(grid, np.zeros((3, grid.n, grid.n), dtype=np.complex128))

    @classmethod
    def from_physical(cls, grid: Grid, t11, t12, t22) -> "SymmetricTensorField":
        return cls(grid, np.stack([grid.forward(t11), grid.forward(t12), grid.forward(t22)]))

    def to_physical(self):
        return tuple(self.grid.inverse(c) for c in self.data)

    def hermitian_defect(self) -> float:
        return hermitian_defect(self.data)

    def hermitianized(self) -> "SymmetricTensorField":
        return SymmetricTensorField(self.grid, hermitianize(self.data))

    def frobenius_sq(self) -> np.ndarray:
        """Per-mode squared Frobenius norm (off-diagonal counted twice)."""
        t11, t12, t22 = self.data
        return np.abs(t11) ** 2 + 2.0 * np.abs(t12) ** 2 + np.abs(t22) ** 2
