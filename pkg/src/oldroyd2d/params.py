"""Physical constants of the coupled velocity/stress system."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysParams:
    """Coefficients of the momentum/stress system.

    alpha : elastic coupling feeding the stress from the strain rate (> 0)
    beta  : stress relaxation (damping) rate, units 1/time (> 0)
    K     : stress-to-momentum coupling (> 0)
    mu    : stress diffusivity, kept as a regularization knob (>= 0)
    """

    alpha: float = 1.0
    beta: float = 1.0
    K: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "K"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.mu < 0.0:
            raise ValueError("mu must be nonnegative")

    @property
    def xi_c(self) -> float:
        """Wavenumber where the per-mode eigenvalues turn from real to complex."""
        return self.beta / math.sqrt(2.0 * self.alpha * self.K)

    def damping(self, xi_sq: float) -> float:
        """Effective per-mode damping rate beta + mu*|xi|^2."""
        return self.beta + self.mu * xi_sq

    def replace_mu(self, mu: float) -> "PhysParams":
        return PhysParams(self.alpha, self.beta, self.K, mu)
