"""Semi-analytic decay laboratory on the whole plane.

Norms of the linearly-evolved pair are computed as radial Fourier integrals

    ||grad^k f(t)||^2 = 2*pi * int_0^inf r^(2k+1) |f_hat(r, t)|^2 dr

for radially symmetric initial profiles, with the mode amplitudes supplied
by the closed-form propagator.  Log-log slope fits against (1 + t) recover
the polynomial decay exponents, and ratio extremes witness the matching
lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import kernels
from .params import PhysParams
from .propagator import constants

BRANCHES = ("u", "sigma")


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class InitialProfile:
    """Radial initial mode amplitudes for the pair.

    u_hat0 / sigma_hat0 map arrays of radii to complex amplitudes.  c2 is
    |u_hat0(0)| (the absolute integral of the initial velocity); r_half is a
    radius on which |u_hat0| stays above c2/2, used by the lower-bound checks.
    """

    u_hat0: Callable[[np.ndarray], np.ndarray]
    sigma_hat0: Callable[[np.ndarray], np.ndarray]
    c2: float
    r_half: float

    def __post_init__(self):
        if self.c2 < 0 or self.r_half < 0:
            raise ValueError("c2 and r_half must be nonnegative")

    def lower_radius(self, R: float) -> float:
        """Radius used by the lower-bound argument: r_half clamped to R."""
        return min(self.r_half, R) if self.c2 > 0 else 0.0


def gaussian_profile(
    u_amplitude: float = 1.0, sigma_amplitude: float = 1.0, width: float = 1.0
) -> InitialProfile:
    """Profiles u_hat0 = a_u exp(-(r/w)^2), sigma_hat0 = a_s exp(-(r/w)^2)."""
    if width <= 0:
        raise ValueError("width must be positive")

    def u0(r):
        return u_amplitude * np.exp(-((r / width) ** 2)) + 0.0j

    def s0(r):
        return sigma_amplitude * np.exp(-((r / width) ** 2)) + 0.0j

    c2 = abs(u_amplitude)
    r_half = width * math.sqrt(math.log(2.0)) if c2 > 0 else 0.0
    return InitialProfile(u0, s0, c2, r_half)


@dataclass(frozen=True)
class DecaySeries:
    """Sampled norm values of one branch and derivative order."""

    times: np.ndarray
    values: np.ndarray
    k: int
    quantity: str  # "u" or "sigma"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be matching 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(v <= 0):
            raise ValueError("series values must be strictly positive")
        if self.quantity not in BRANCHES:
            raise ValueError(f"quantity must be one of {BRANCHES}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@lru_cache(maxsize=16)
def _gauss_rule(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _adaptive_piece(f, a: float, b: float, rel_tol: float, abs_floor: float):
    """Gauss-Legendre with node doubling until successive estimates agree."""
    prev = None
    last_err = math.inf
    for m in (16, 32, 64, 128, 256, 512, 1024):
        x, w = _gauss_rule(m)
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        q = half * float(np.dot(w, f(mid + half * x)))
        if prev is not None:
            last_err = abs(q - prev)
            if last_err <= max(rel_tol * abs(q), abs_floor):
                return q, last_err
        prev = q
    achieved = last_err / abs(q) if q else math.inf
    raise QuadratureError(
        f"no convergence on [{a:g}, {b:g}]: achieved relative tolerance "
        f"{achieved:.3e} vs requested {rel_tol:g}"
    )


def _mode_amplitude_sq(p: PhysParams, ic: InitialProfile, k: int, branch: str, t: float):
    """Integrand r^(2k+1) |branch_hat(r, t)|^2 as a vectorized callable."""

    def f(r):
        g1, g2, g3 = kernels.green_table(p.alpha, p.beta, p.K, p.mu, r, t)
        u0 = ic.u_hat0(r)
        s0 = ic.sigma_hat0(r)
        if branch == "u":
            amp = g3 * u0 + (p.K * r * g1) * s0
        else:
            amp = (-0.5 * p.alpha * r * g1) * u0 + g2 * s0
        return r ** (2 * k + 1) * np.abs(amp) ** 2

    return f


def linear_norm_quadrature(
    p: PhysParams,
    ic: InitialProfile,
    k: int,
    branch: str,
    t: float,
    rel_tol: float = 1e-9,
) -> float:
    """(2*pi * int_0^inf r^(2k+1) |branch_hat(r,t)|^2 dr)^(1/2).

    The radial axis is covered by dyadic pieces scaled to the width of the
    damped envelope; integration stops once the tail contributes below 1e-30
    of the running total, and is capped at 8 * xi_c.
    """
    if not 0 <= k <= 3:
        raise ValueError("derivative order k must be in 0..3")
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    if t < 0:
        raise ValueError("t must be nonnegative")

    c = constants(p)
    f = _mode_amplitude_sq(p, ic, k, branch, t)
    # characteristic width of the Gaussian envelope at this time
    scale = 1.0 / math.sqrt(1.0 + c.theta * t)
    r_max = 8.0 * c.xi_c

    total = 0.0
    negligible = 0
    a = 0.0
    edge = min(scale, r_max)
    for _ in range(200):
        q, _err = _adaptive_piece(f, a, edge, rel_tol, abs_floor=1e-300 + rel_tol * total)
        total += q
        if abs(q) < 1e-30 * max(total, 1e-300):
            negligible += 1
            if negligible >= 2 and total > 0.0:
                break
        else:
            negligible = 0
        if edge >= r_max:
            break
        a = edge
        edge = min(2.0 * edge, r_max)
    return math.sqrt(2.0 * math.pi * total)


def decay_series(
    p: PhysParams,
    ic: InitialProfile,
    k: int,
    branch: str,
    times,
    rel_tol: float = 1e-9,
) -> DecaySeries:
    times = np.asarray(times, dtype=np.float64)
    values = np.array(
        [linear_norm_quadrature(p, ic, k, branch, t, rel_tol) for t in times]
    )
    return DecaySeries(times, values, k, branch)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    stderr: float
    window: tuple[float, float]
    n_samples: int


def fit_decay_exponent(s: DecaySeries, window: tuple[float, float]) -> DecayFit:
    """Ordinary least squares of log(value) against log(1 + t) inside the window."""
    lo, hi = window
    sel = (s.times >= lo) & (s.times <= hi)
    n = int(np.count_nonzero(sel))
    if n < 10:
        raise ValueError(f"need at least 10 samples in the window, found {n}")
    x = np.log1p(s.times[sel])
    y = np.log(s.values[sel])
    xm = x - x.mean()
    sxx = float(np.dot(xm, xm))
    slope = float(np.dot(xm, y) / sxx)
    resid = y - (y.mean() + slope * xm)
    dof = max(n - 2, 1)
    stderr = math.sqrt(float(np.dot(resid, resid)) / dof / sxx)
    return DecayFit(slope, stderr, (float(lo), float(hi)), n)


def lower_bound_ratio(s: DecaySeries, exponent: float, t1: float) -> tuple[float, float]:
    """Extremes of value(t) * (1 + t)^(-exponent) over samples with t >= t1.

    A bounded positive minimum certifies the two-sided sharpness of the decay
    exponent; requires a generating profile with c2 > 0.
    """
    sel = s.times >= t1
    if not np.any(sel):
        raise ValueError("empty window: no samples at or after t1")
    ratios = s.values[sel] * (1.0 + s.times[sel]) ** (-exponent)
    return float(ratios.min()), float(ratios.max())


def log_spaced_times(lo: float, hi: float, n: int) -> np.ndarray:
    if not (hi > lo > 0) or n < 2:
        raise ValueError("need hi > lo > 0 and n >= 2")
    return np.geomspace(lo, hi, n)
