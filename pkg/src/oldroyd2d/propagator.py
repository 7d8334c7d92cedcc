"""Closed-form evolution of single Fourier modes of the linearized system.

Each mode of the projected (velocity, reduced-stress) pair obeys

    u_hat' = K |xi| sigma_hat
    sigma_hat' = -(beta + mu |xi|^2) sigma_hat - (alpha/2) |xi| u_hat

whose solution is expressed through three scalar kernels G1, G2, G3 built
from the eigenvalues lam_pm of the 2x2 mode matrix.  A brute-force RK4
integrator of the same system serves as an independent oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .params import PhysParams


@dataclass(frozen=True)
class SpectralConstants:
    """Derived rates and radii controlling the low-frequency behavior.

    R    : low-frequency radius beta / (2 sqrt(alpha K))
    theta: Gaussian upper-bound rate alpha K / (2 beta)
    eta  : Gaussian lower-bound rate alpha K / beta
    t1   : onset time sqrt(2) ln 2 / beta for the lower bounds
    xi_c : critical wavenumber beta / sqrt(2 alpha K) (real/oscillatory split)
    """

    R: float
    theta: float
    eta: float
    t1: float
    xi_c: float


def constants(p: PhysParams) -> SpectralConstants:
    ak = p.alpha * p.K
    return SpectralConstants(
        R=p.beta / (2.0 * math.sqrt(ak)),
        theta=ak / (2.0 * p.beta),
        eta=ak / p.beta,
        t1=math.sqrt(2.0) * math.log(2.0) / p.beta,
        xi_c=p.beta / math.sqrt(2.0 * ak),
    )


def eigenvalues(p: PhysParams, xi_mag: float) -> tuple[complex, complex]:
    """Eigenvalues lam_pm = (-b +- sqrt(b^2 - 2 alpha K xi^2)) / 2, b = beta + mu xi^2.

    On the real branch lam_plus is evaluated in the rationalized form
    -alpha K xi^2 / (b + sqrt(disc)), which is cancellation-free for small xi.
    """
    if xi_mag < 0:
        raise ValueError("xi_mag must be nonnegative")
    xi2 = xi_mag * xi_mag
    b = p.damping(xi2)
    disc = b * b - 2.0 * p.alpha * p.K * xi2
    if disc >= 0.0:
        d = math.sqrt(disc)
        lam_m = -0.5 * (b + d)
        lam_p = -p.alpha * p.K * xi2 / (b + d)
        return complex(lam_p), complex(lam_m)
    root = cmath.sqrt(disc)
    return 0.5 * (-b + root), 0.5 * (-b - root)


@dataclass(frozen=True)
class GreenEval:
    """Kernel values at one (|xi|, t) with the eigenvalues used to form them."""

    G1: float
    G2: float
    G3: float
    lambda_plus: complex
    lambda_minus: complex


def green_eval(p: PhysParams, xi_mag: float, t: float) -> GreenEval:
    if t < 0:
        raise ValueError("t must be nonnegative")
    g1, g2, g3 = kernels.green_table(p.alpha, p.beta, p.K, p.mu, xi_mag, t)
    lam_p, lam_m = eigenvalues(p, xi_mag)
    return GreenEval(float(g1[0]), float(g2[0]), float(g3[0]), lam_p, lam_m)


@dataclass(frozen=True)
class ModeState:
    """One Fourier mode of the pair: complex 2-vectors at wavenumber magnitude xi_mag."""

    u_hat: np.ndarray
    sigma_hat: np.ndarray
    xi_mag: float

    def __post_init__(self):
        u = np.asarray(self.u_hat, dtype=np.complex128).reshape(2)
        s = np.asarray(self.sigma_hat, dtype=np.complex128).reshape(2)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(s))):
            raise ValueError("mode state entries must be finite")
        if self.xi_mag < 0:
            raise ValueError("xi_mag must be nonnegative")
        object.__setattr__(self, "u_hat", u)
        object.__setattr__(self, "sigma_hat", s)


def propagate_mode(p: PhysParams, m: ModeState, t: float) -> ModeState:
    """Exact evolution over time t:
    u(t) = G3 u0 + K|xi| G1 s0,  s(t) = -(alpha/2)|xi| G1 u0 + G2 s0.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    g = green_eval(p, m.xi_mag, t)
    xi = m.xi_mag
    u = g.G3 * m.u_hat + (p.K * xi * g.G1) * m.sigma_hat
    s = (-0.5 * p.alpha * xi * g.G1) * m.u_hat + g.G2 * m.sigma_hat
    return ModeState(u, s, xi)


def oracle_dt_limit(p: PhysParams, xi_mag: float) -> float:
    """Largest admissible oracle step 0.01 / max(beta, sqrt(alpha K) xi, mu xi^2)."""
    rate = max(p.beta, math.sqrt(p.alpha * p.K) * xi_mag, p.mu * xi_mag * xi_mag)
    return 0.01 / rate


def mode_ode_oracle(p: PhysParams, m: ModeState, t: float, dt: float) -> ModeState:
    """Reference RK4 integration of the mode system; global error O(dt^4).

    Refuses dt above the resolution limit so the oracle stays trustworthy.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    limit = oracle_dt_limit(p, m.xi_mag)
    if dt > limit:
        raise ValueError(f"oracle step dt={dt:g} too large; need dt <= {limit:g}")
    if t == 0.0:
        return ModeState(m.u_hat.copy(), m.sigma_hat.copy(), m.xi_mag)
    n_steps = max(1, math.ceil(t / dt))
    xi = np.full(2, m.xi_mag)
    u, s = kernels.rk4_evolve(p.alpha, p.beta, p.K, p.mu, xi, m.u_hat, m.sigma_hat, t, n_steps)
    return ModeState(u, s, m.xi_mag)


def propagator_matrix(p: PhysParams, xi_mag: float, t: float) -> np.ndarray:
    """2x2 real matrix sending (u0, s0) to (u(t), s(t)) for one scalar mode pair."""
    g = green_eval(p, xi_mag, t)
    return np.array(
        [
            [g.G3, p.K * xi_mag * g.G1],
            [-0.5 * p.alpha * xi_mag * g.G1, g.G2],
        ]
    )


def oracle_matrix(p: PhysParams, xi_mag: float, t: float, n_steps: int) -> np.ndarray:
    """Same matrix from the RK4 oracle applied to the two basis states."""
    xi = np.full(2, xi_mag)
    u0 = np.array([1.0, 0.0], dtype=np.complex128)
    s0 = np.array([0.0, 1.0], dtype=np.complex128)
    if n_steps < 1 or t == 0.0:
        return np.eye(2)
    u, s = kernels.rk4_evolve(p.alpha, p.beta, p.K, p.mu, xi, u0, s0, t, n_steps)
    return np.array([[u[0].real, u[1].real], [s[0].real, s[1].real]])


def green_table_rows(p: PhysParams, xis, ts) -> list[tuple]:
    """(xi, t, G1, G2, G3, lam+, lam-) rows for the CSV dump."""
    rows = []
    for t in ts:
        g1, g2, g3 = kernels.green_table(p.alpha, p.beta, p.K, p.mu, np.asarray(xis, float), t)
        for i, xi in enumerate(xis):
            lam_p, lam_m = eigenvalues(p, float(xi))
            rows.append((float(xi), float(t), float(g1[i]), float(g2[i]), float(g3[i]), lam_p, lam_m))
    return rows
