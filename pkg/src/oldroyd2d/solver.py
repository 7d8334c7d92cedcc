"""Nonlinear time evolution of the velocity/stress pair on the torus.

Time stepping is an integrating-factor Runge-Kutta scheme: the diagonal
damping/diffusion of the stress carries the exact factor
exp(-(beta + mu |xi|^2) dt), while the couplings (stress divergence and
strain-rate source) and both transports advance explicitly.  Quadratic
products are formed in physical space on the 2/3-dealiased band, which keeps
the discrete transport terms exactly energy-neutral; every state is
re-projected and re-symmetrized after the step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .fields import SpectralVectorField, SymmetricTensorField
from .grid import Grid, _half_multipliers, hermitianize
from .operators import TENSOR_WEIGHTS, hk_norm, leray_project_arrays
from .params import PhysParams


class BlowUpError(RuntimeError):
    """A non-finite value appeared in the evolved spectra."""

    def __init__(self, time: float, partial=None):
        super().__init__(f"blow-up detected at t = {time:.6g}")
        self.time = time
        self.partial = partial if partial is not None else []


class CFLViolationError(RuntimeError):
    """Advective stability check failed for the configured step."""

    def __init__(self, dt: float, suggested: float):
        super().__init__(
            f"CFL violation: dt = {dt:g} exceeds the advective limit; try dt <= {suggested:.3e}"
        )
        self.suggested_dt = suggested


@dataclass(frozen=True)
class StepConfig:
    """Time-step parameters."""

    dt: float
    dealias_fraction: float = 2.0 / 3.0
    scheme: int = 4
    nonlinear: bool = True
    cfl_limit: float = 0.5

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.scheme not in (2, 4):
            raise ValueError("scheme must be 2 or 4 (explicit RK order)")
        if not 0 < self.dealias_fraction <= 1:
            raise ValueError("dealias_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class SimState:
    """Immutable snapshot of the pair: spectra, time, and parameters."""

    grid: Grid
    params: PhysParams
    t: float
    u: np.ndarray  # (2, n, n) complex, divergence-free
    tau: np.ndarray  # (3, n, n) complex, components (11, 12, 22)

    @property
    def velocity(self) -> SpectralVectorField:
        return SpectralVectorField(self.grid, self.u)

    @property
    def stress(self) -> SymmetricTensorField:
        return SymmetricTensorField(self.grid, self.tau)

    def pair_h3(self) -> float:
        """Inhomogeneous third-order norm of the pair."""
        return math.sqrt(
            hk_norm(self.grid, self.u, 3) ** 2
            + hk_norm(self.grid, self.tau, 3, TENSOR_WEIGHTS) ** 2
        )


def new_state(
    grid: Grid,
    params: PhysParams,
    u_hat: np.ndarray,
    tau_hat: np.ndarray,
    t: float = 0.0,
    dealias_fraction: float = 2.0 / 3.0,
) -> SimState:
    """Sanitize loaded data: symmetrize spectra, project the velocity, and
    truncate to the dealiased band (stress symmetry is structural)."""
    mask = grid.dealias_mask(dealias_fraction)
    u = leray_project_arrays(grid, hermitianize(np.asarray(u_hat, np.complex128)) * mask)
    tau = hermitianize(np.asarray(tau_hat, np.complex128)) * mask
    return SimState(grid, params, t, u, tau)


# ---------------------------------------------------------------------------
# Right-hand side
# ---------------------------------------------------------------------------


def _coupling_arrays(grid: Grid, params: PhysParams, u_hat, tau_hat):
    """Explicit linear couplings: K * P(div tau) for u, alpha * D(u) for tau."""
    kx, ky = grid.kx, grid.ky
    t11, t12, t22 = tau_hat
    div = np.empty_like(u_hat)
    div[0] = 1j * (kx * t11 + ky * t12)
    div[1] = 1j * (kx * t12 + ky * t22)
    nu = params.K * leray_project_arrays(grid, div)

    ntau = np.empty_like(tau_hat)
    ntau[0] = params.alpha * (1j * kx * u_hat[0])
    ntau[1] = params.alpha * 0.5j * (kx * u_hat[1] + ky * u_hat[0])
    ntau[2] = params.alpha * (1j * ky * u_hat[1])
    return nu, ntau


def _advection_arrays(grid: Grid, u_hat, tau_hat, fraction: float):
    """-(u . grad) u and -(u . grad) tau with products on the dealiased grid.

    The inverse transforms run on the rfft2 half-spectrum (the fields are
    real); the real products go back through a full fft2, which is hermitian
    by construction.  Returns the two spectral forcings and the physical
    max |u| for the stability check.
    """
    n = grid.n
    m = n // 2 + 1
    mask = grid.dealias_mask(fraction)
    ikx, iky, mask_h = _half_multipliers(n, grid.L, float(fraction))
    uh = u_hat[..., :m] * mask_h
    th = tau_hat[..., :m] * mask_h
    stack = np.empty((12, n, m), dtype=np.complex128)
    stack[0:2] = uh
    stack[2:4] = ikx * uh
    stack[4:6] = iky * uh
    stack[6:9] = ikx * th
    stack[9:12] = iky * th
    phys = np.fft.irfft2(stack, s=(n, n)) * (n * n)
    u1, u2 = phys[0], phys[1]
    dx_u, dy_u = phys[2:4], phys[4:6]
    dx_t, dy_t = phys[6:9], phys[9:12]

    prod = np.empty((5, n, n))
    prod[0] = u1 * dx_u[0] + u2 * dy_u[0]
    prod[1] = u1 * dx_u[1] + u2 * dy_u[1]
    for c in range(3):
        prod[2 + c] = u1 * dx_t[c] + u2 * dy_t[c]
    spec = np.fft.fft2(prod) / (n * n)
    f_u = -spec[0:2] * mask
    f_tau = -spec[2:5] * mask
    max_speed = float(np.sqrt(u1 * u1 + u2 * u2).max())
    return f_u, f_tau, max_speed


def nonlinear_terms(s: SimState, dealias_fraction: float = 2.0 / 3.0):
    """Transport forcings (F_u, F_tau) = (-P(u.grad u), -u.grad tau).

    F_u is projected; both are truncated to the dealiased band.
    """
    f_u, f_tau, _ = _advection_arrays(s.grid, s.u, s.tau, dealias_fraction)
    if not (np.all(np.isfinite(f_u)) and np.all(np.isfinite(f_tau))):
        raise BlowUpError(s.t)
    f_u = leray_project_arrays(s.grid, f_u)
    return SpectralVectorField(s.grid, f_u), SymmetricTensorField(s.grid, f_tau)


def pressure_field(s: SimState, dealias_fraction: float = 2.0 / 3.0) -> np.ndarray:
    """Diagnostic reconstruction of the eliminated pressure.

    Solves -lap p = div(u.grad u) - K div div tau mode-wise; the mean of p
    is fixed to zero.  The pressure is never part of the evolved state.
    """
    grid, p = s.grid, s.params
    kx, ky = grid.kx, grid.ky
    adv_u, _, _ = _advection_arrays(grid, s.u, s.tau, dealias_fraction)
    div_adv = 1j * (kx * (-adv_u[0]) + ky * (-adv_u[1]))  # adv arrays carry -(u.grad u)
    t11, t12, t22 = s.tau
    div_div_tau = -(kx * kx * t11 + 2.0 * kx * ky * t12 + ky * ky * t22)
    k_sq = grid.k_sq.copy()
    k_sq[0, 0] = 1.0
    out = (div_adv - p.K * div_div_tau) / k_sq
    out[0, 0] = 0.0
    return out


def _rhs(grid, params, config, u_hat, tau_hat):
    nu, ntau = _coupling_arrays(grid, params, u_hat, tau_hat)
    max_speed = 0.0
    if config.nonlinear:
        f_u, f_tau, max_speed = _advection_arrays(grid, u_hat, tau_hat, config.dealias_fraction)
        nu = nu + leray_project_arrays(grid, f_u)
        ntau = ntau + f_tau
    return nu, ntau, max_speed


def step(s: SimState, c: StepConfig) -> SimState:
    """Advance one step of size c.dt; raises on CFL violation or blow-up."""
    grid, p = s.grid, s.params
    mask = grid.dealias_mask(c.dealias_fraction)
    dt = c.dt
    u0 = s.u * mask
    tau0 = s.tau * mask

    damp = p.beta + p.mu * grid.k_sq
    e_half = np.exp(-0.5 * dt * damp)
    e_full = e_half * e_half

    k1u, k1t, speed = _rhs(grid, p, c, u0, tau0)
    if c.nonlinear:
        advective = speed * grid.k_max
        if dt * advective > c.cfl_limit:
            raise CFLViolationError(dt, c.cfl_limit / advective)

    if c.scheme == 2:
        u_mid = u0 + 0.5 * dt * k1u
        t_mid = e_half * (tau0 + 0.5 * dt * k1t)
        k2u, k2t, _ = _rhs(grid, p, c, u_mid, t_mid)
        u_new = u0 + dt * k2u
        tau_new = e_full * tau0 + dt * e_half * k2t
    else:
        u_s = u0 + 0.5 * dt * k1u
        t_s = e_half * (tau0 + 0.5 * dt * k1t)
        k2u, k2t, _ = _rhs(grid, p, c, u_s, t_s)
        u_s = u0 + 0.5 * dt * k2u
        t_s = e_half * tau0 + 0.5 * dt * k2t
        k3u, k3t, _ = _rhs(grid, p, c, u_s, t_s)
        u_s = u0 + dt * k3u
        t_s = e_full * tau0 + dt * e_half * k3t
        k4u, k4t, _ = _rhs(grid, p, c, u_s, t_s)
        u_new = u0 + (dt / 6.0) * (k1u + 2.0 * (k2u + k3u) + k4u)
        tau_new = e_full * tau0 + (dt / 6.0) * (
            e_full * k1t + 2.0 * e_half * (k2t + k3t) + k4t
        )

    t_next = s.t + dt
    if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(tau_new))):
        raise BlowUpError(t_next)
    u_new = hermitianize(leray_project_arrays(grid, u_new))
    tau_new = hermitianize(tau_new)
    return SimState(grid, p, t_next, u_new, tau_new)


def run(
    s0: SimState,
    c: StepConfig,
    T: float,
    sample_every: float,
    etas=None,
    on_sample=None,
):
    """Advance to time T, emitting (t, EnergyReport) monitor samples.

    T and sample_every must be (near-)integer multiples of c.dt.  The
    optional on_sample(state) callback runs on every sampled snapshot.  On
    blow-up the partial series is attached to the raised error.
    """
    from .monitors import EtaCoefficients, evaluate  # deferred: avoids an import cycle

    if T < 0 or sample_every <= 0:
        raise ValueError("need T >= 0 and sample_every > 0")
    n_steps = _as_multiple(T, c.dt, "horizon T")
    stride = _as_multiple(sample_every, c.dt, "sample_every") if n_steps else 1
    etas = etas if etas is not None else EtaCoefficients()

    samples = []

    def take(state):
        if on_sample is not None:
            on_sample(state)
        samples.append((state.t, evaluate(state, etas)))

    state = new_state(s0.grid, s0.params, s0.u, s0.tau, s0.t, c.dealias_fraction)
    take(state)
    try:
        for i in range(1, n_steps + 1):
            state = step(state, c)
            if i % stride == 0 or i == n_steps:
                take(state)
    except BlowUpError as err:
        raise BlowUpError(err.time, partial=samples) from None
    return samples


def _as_multiple(span: float, dt: float, what: str) -> int:
    n = span / dt
    if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
        raise ValueError(f"{what} = {span:g} is not a multiple of dt = {dt:g}")
    return int(round(n))


# ---------------------------------------------------------------------------
# Initial data families
# ---------------------------------------------------------------------------


def _scale_pair(grid, u_hat, tau_hat, h3_norm, tau_weight):
    su = hk_norm(grid, u_hat, 3)
    st = hk_norm(grid, tau_hat, 3, TENSOR_WEIGHTS)
    if su > 0:
        u_hat = u_hat * (math.sqrt(max(1.0 - tau_weight, 0.0)) * h3_norm / su)
    if st > 0:
        tau_hat = tau_hat * (math.sqrt(tau_weight) * h3_norm / st)
    return u_hat, tau_hat


def random_state(
    grid: Grid,
    params: PhysParams,
    h3_norm: float,
    seed: int,
    band: float = 0.0,
    tau_weight: float = 0.5,
) -> SimState:
    """Band-limited random data with a prescribed pair norm.

    band is the largest populated |xi| (0 selects half the resolved range,
    which keeps every mode on the overdamped side for unit parameters).
    Modes carry a Gaussian spectral envelope; the mean mode stays empty.
    """
    if h3_norm < 0:
        raise ValueError("h3_norm must be nonnegative")
    if not 0 <= tau_weight <= 1:
        raise ValueError("tau_weight must lie in [0, 1]")
    if band <= 0:
        band = 0.5 * grid.k_max
    rng = np.random.default_rng(seed)
    shape = (5, grid.n, grid.n)
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    support = (grid.k_mag <= band) & (grid.k_mag > 0)
    envelope = np.exp(-((grid.k_mag / band) ** 2)) * support
    raw *= envelope
    u = hermitianize(raw[:2])
    tau = hermitianize(raw[2:])
    u = leray_project_arrays(grid, u)
    u, tau = _scale_pair(grid, u, tau, h3_norm, tau_weight)
    return SimState(grid, params, 0.0, u, tau)


def taylor_green_state(
    grid: Grid, params: PhysParams, h3_norm: float, tau_weight: float = 0.5
) -> SimState:
    """Deterministic cellular-vortex data scaled to the prescribed pair norm."""
    x, y = grid.points()
    w = 2.0 * math.pi / grid.L
    u1 = np.sin(w * x) * np.cos(w * y)
    u2 = -np.cos(w * x) * np.sin(w * y)
    t11 = np.sin(w * x) * np.sin(w * y)
    t22 = -t11
    t12 = np.zeros_like(t11)
    u = np.stack([grid.forward(u1), grid.forward(u2)])
    tau = np.stack([grid.forward(t11), grid.forward(t12), grid.forward(t22)])
    u = leray_project_arrays(grid, hermitianize(u))
    tau = hermitianize(tau)
    u, tau = _scale_pair(grid, u, tau, h3_norm, tau_weight)
    return SimState(grid, params, 0.0, u, tau)


def zero_state(grid: Grid, params: PhysParams) -> SimState:
    return SimState(
        grid,
        params,
        0.0,
        np.zeros((2, grid.n, grid.n), np.complex128),
        np.zeros((3, grid.n, grid.n), np.complex128),
    )


# ---------------------------------------------------------------------------
# Checkpoints: binary spectra plus a JSON sidecar
# ---------------------------------------------------------------------------

_HEADER_DTYPE = np.dtype([("n", "<u8"), ("L", "<f8"), ("t", "<f8")])


def save_checkpoint(path, state: SimState, config_hash: str = "") -> None:
    """Raw little-endian spectra, components (u1, u2, t11, t12, t22), row-major,
    preceded by (n, L, t); parameters and the config hash go to a JSON sidecar."""
    path = Path(path)
    header = np.array([(state.grid.n, state.grid.L, state.t)], dtype=_HEADER_DTYPE)
    payload = np.concatenate([state.u, state.tau]).astype("<c16")
    with open(path, "wb") as fh:
        header.tofile(fh)
        payload.tofile(fh)
    sidecar = {
        "K": state.params.K,
        "L": state.grid.L,
        "alpha": state.params.alpha,
        "beta": state.params.beta,
        "components": ["u1", "u2", "tau11", "tau12", "tau22"],
        "config_hash": config_hash,
        "mu": state.params.mu,
        "n": state.grid.n,
        "t": state.t,
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_checkpoint(path) -> SimState:
    """Read spectra verbatim; callers wanting load sanitization (projection,
    symmetrization, band truncation) should pass the result through new_state."""
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text(encoding="utf-8"))
    with open(path, "rb") as fh:
        header = np.fromfile(fh, dtype=_HEADER_DTYPE, count=1)[0]
        n = int(header["n"])
        payload = np.fromfile(fh, dtype="<c16").reshape(5, n, n)
    grid = Grid(n, float(header["L"]))
    params = PhysParams(sidecar["alpha"], sidecar["beta"], sidecar["K"], sidecar["mu"])
    data = payload.astype(np.complex128)
    return SimState(grid, params, float(header["t"]), data[:2], data[2:])


def with_params(state: SimState, params: PhysParams) -> SimState:
    return replace(state, params=params)
