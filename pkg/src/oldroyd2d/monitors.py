"""Lyapunov functional hierarchy, cross terms, splitting radii, and the
discrete balance-law residual, evaluated on solver snapshots."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .operators import FrequencyCutoff, freq_split, sigma_from_tau, sobolev_norm, tensor_sobolev_norm
from .params import PhysParams
from .propagator import constants
from .solver import SimState


class EtaConstraintError(ValueError):
    """Cross-term coefficients violate their structural constraints."""


@dataclass(frozen=True)
class EtaCoefficients:
    """Small weights of the velocity/stress cross terms.

    The ratios eta2 = eta1/4 and eta3 = eta2/4 are structural; eta4 is an
    independent small weight defaulting to eta3.
    """

    eta1: float = 0.01
    eta4: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not self.eta1 > 0:
            raise EtaConstraintError("eta1 must be positive")
        if self.eta4 is None:
            object.__setattr__(self, "eta4", self.eta3)
        if not self.eta4 > 0:
            raise EtaConstraintError("eta4 must be positive")

    @property
    def eta2(self) -> float:
        return self.eta1 / 4.0

    @property
    def eta3(self) -> float:
        return self.eta1 / 16.0

    def validate_for(self, params: PhysParams) -> None:
        # the damping absorption in the first-level estimate needs eta1/8 <= beta/2
        if self.eta1 > 4.0 * params.beta:
            raise EtaConstraintError(
                f"eta1 = {self.eta1:g} violates eta1 <= 4*beta = {4.0 * params.beta:g}"
            )


@dataclass(frozen=True)
class EnergyReport:
    """All monitored quantities of one snapshot.

    u_norms/tau_norms hold the homogeneous derivative norms of orders 0..3.
    cross holds the pairings (Lambda^k u, Lambda^(k-1) sigma) for k = 1..3
    plus the high-frequency variant (Lambda^3 u, Lambda^2 sigma_high); the
    fully high-passed pairing used inside H5 is kept separately.
    balance_residual is filled post hoc from neighboring samples.
    """

    t: float
    u_norms: tuple
    tau_norms: tuple
    H: tuple
    cross: tuple
    cross_high_pair: float
    g1: float
    g2: float
    lowfreq_mass: float
    balance_residual: float = math.nan


CSV_HEADER = (
    "t,u_l2,u_h1,u_h2,u_h3,tau_l2,tau_h1,tau_h2,tau_h3,"
    "H1,H2,H3,H4,H5,cross1,cross2,cross3,cross3_high,"
    "residual,g1,g2,lowfreq_mass"
)


def report_row(r: EnergyReport) -> str:
    vals = (
        (r.t,)
        + r.u_norms
        + r.tau_norms
        + r.H
        + r.cross
        + (r.balance_residual, r.g1, r.g2, r.lowfreq_mass)
    )
    return ",".join(f"{v:.17g}" for v in vals)


def splitting_radii(etas: EtaCoefficients, t: float) -> tuple[float, float]:
    """Shrinking low-frequency radii g1, g2 with g^2 proportional to 1/(1+t)."""
    g1 = math.sqrt(24.0 / etas.eta1 / (1.0 + t))
    g2 = math.sqrt(160.0 / etas.eta2 / (1.0 + t))
    return g1, g2


@dataclass(frozen=True)
class SplittingDiagnostics:
    g1: float
    g2: float
    lowfreq_mass: float
    past_g1_onset: bool
    past_g2_onset: bool
    g1_onset_time: float
    g2_onset_time: float


def splitting_diagnostics(s: SimState, etas: EtaCoefficients) -> SplittingDiagnostics:
    """Radii at the state's time, onset flags (g <= 1 from the onset time on),
    and the discrete velocity mass below g1."""
    g1, g2 = splitting_radii(etas, s.t)
    mass = float(
        np.sum((np.abs(s.u[0]) ** 2 + np.abs(s.u[1]) ** 2)[s.grid.k_mag <= g1])
    )
    t_g1 = 24.0 / etas.eta1 - 1.0
    t_g2 = 160.0 / etas.eta2 - 1.0
    return SplittingDiagnostics(g1, g2, mass, s.t >= t_g1, s.t >= t_g2, t_g1, t_g2)


def _cross_weighted(grid, u_hat, sigma_hat, power: int) -> float:
    """Re sum |xi|^power u_hat . conj(sigma_hat) (pairing of Lambda^k u with
    Lambda^(k-1) sigma has power = 2k - 1)."""
    w = grid.k_mag**power
    acc = u_hat[0] * np.conj(sigma_hat[0]) + u_hat[1] * np.conj(sigma_hat[1])
    return float(np.sum(acc.real * w))


def evaluate(s: SimState, etas: EtaCoefficients) -> EnergyReport:
    """Compute every monitored quantity from one immutable snapshot."""
    etas.validate_for(s.params)
    grid, p = s.grid, s.params
    alpha, K = p.alpha, p.K

    u_norms = tuple(sobolev_norm(grid, s.u, k) for k in range(4))
    tau_norms = tuple(tensor_sobolev_norm(grid, s.tau, k) for k in range(4))

    sigma = sigma_from_tau(s.stress).data
    cut = FrequencyCutoff(constants(p).R)
    u_high = freq_split(grid, s.u, cut)[1]
    sigma_high = freq_split(grid, sigma, cut)[1]

    cross = tuple(_cross_weighted(grid, s.u, sigma, 2 * k - 1) for k in (1, 2, 3))
    cross3_high = _cross_weighted(grid, s.u, sigma_high, 5)
    cross_high_pair = _cross_weighted(grid, u_high, sigma_high, 5)

    usq = [v * v for v in u_norms]
    tsq = [v * v for v in tau_norms]
    u3_high_sq = sobolev_norm(grid, u_high, 3) ** 2

    h1 = alpha * (usq[0] + usq[1]) + K * (tsq[0] + tsq[1]) + etas.eta1 * cross[0]
    h2 = alpha * (usq[1] + usq[2]) + K * (tsq[1] + tsq[2]) + etas.eta2 * cross[1]
    h3 = alpha * (usq[2] + usq[3]) + K * (tsq[2] + tsq[3]) + etas.eta3 * cross[2]
    h4 = alpha * usq[3] + K * tsq[3] + etas.eta4 * cross3_high
    h5 = alpha * u3_high_sq + K * tsq[3] + etas.eta3 * cross_high_pair

    sd = splitting_diagnostics(s, etas)
    return EnergyReport(
        t=s.t,
        u_norms=u_norms,
        tau_norms=tau_norms,
        H=(h1, h2, h3, h4, h5),
        cross=cross + (cross3_high,),
        cross_high_pair=cross_high_pair,
        g1=sd.g1,
        g2=sd.g2,
        lowfreq_mass=sd.lowfreq_mass,
    )


def balance_rows(params: PhysParams, samples: Sequence[tuple[float, EnergyReport]]):
    """(t, alpha||u||^2, K||tau||^2, beta K||tau||^2, mu K||grad tau||^2) rows."""
    rows = []
    for t, r in samples:
        u2 = r.u_norms[0] ** 2
        t2 = r.tau_norms[0] ** 2
        gt2 = r.tau_norms[1] ** 2
        rows.append(
            (t, params.alpha * u2, params.K * t2, params.beta * params.K * t2,
             params.mu * params.K * gt2)
        )
    return rows


def balance_residual(samples: Sequence[tuple]) -> float:
    """Max | d/dt [ (alpha||u||^2 + K||tau||^2)/2 ] + beta K||tau||^2
    + mu K||grad tau||^2 |, centered differences, normalized by the initial
    energy.  Needs at least 3 uniformly spaced samples."""
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    t = np.array([row[0] for row in samples])
    gaps = np.diff(t)
    h = gaps[0]
    if h <= 0 or np.any(np.abs(gaps - h) > 1e-9 * max(h, 1.0)):
        raise ValueError("samples must be uniformly spaced")
    energy = np.array([row[1] + row[2] for row in samples])
    dissipation = np.array([row[3] + row[4] for row in samples])
    dE = (energy[2:] - energy[:-2]) / (2.0 * h)
    resid = 0.5 * dE + dissipation[1:-1]
    scale = energy[0] if energy[0] > 0 else 1.0
    return float(np.max(np.abs(resid)) / scale)


def residual_column(params: PhysParams, samples) -> list[EnergyReport]:
    """Reports with the interior per-sample balance residual filled in."""
    rows = balance_rows(params, samples)
    reports = [r for _, r in samples]
    if len(rows) < 3:
        return reports
    t = np.array([r[0] for r in rows])
    h = t[1] - t[0]
    uniform = np.all(np.abs(np.diff(t) - h) <= 1e-9 * max(h, 1.0))
    if not uniform:
        return reports
    energy = np.array([r[1] + r[2] for r in rows])
    dissipation = np.array([r[3] + r[4] for r in rows])
    scale = energy[0] if energy[0] > 0 else 1.0
    out = [reports[0]]
    for i in range(1, len(rows) - 1):
        resid = (0.5 * (energy[i + 1] - energy[i - 1]) / (2.0 * h) + dissipation[i]) / scale
        out.append(replace(reports[i], balance_residual=float(resid)))
    out.append(reports[-1])
    return out
