"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The per-mode Green-function table and the Runge-Kutta mode oracle are
evaluated at many (wavenumber, time) points by the decay quadrature and the
validation sweeps; both carry branch logic per element, which is where the
jit path pays off.  Set OLDROYD2D_PURE_NUMPY=1 to force the numpy path
(automatic when numba is not importable).  Both paths run the identical
arithmetic, so results agree to rounding.

Branches of the closed-form table, with b = beta + mu*xi^2 and
disc = b^2 - 2*alpha*K*xi^2:

* real (disc > 0):  lam_pm = (-b +- sqrt(disc))/2; the differences of
  exponentials are evaluated through expm1 against the e^{lam_+ t}
  prefactor, which is cancellation-free and cannot overflow.
* oscillatory (disc < 0): damped sine/cosine form with
  w = sqrt(-disc)/2, guaranteed real output.
* near-double root (|lam_+ - lam_-| < 1e-6 * beta): analytic limit
  G1 = t e^{lt}, G2 = (1 + lt) e^{lt}, G3 = (1 - lt) e^{lt}.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = ["backend", "green_table", "rk4_evolve"]

_FORCE_NUMPY = os.environ.get("OLDROYD2D_PURE_NUMPY", "") == "1"

try:  # pragma: no cover - import guard
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


def backend() -> str:
    """Active kernel backend, "numba" or "numpy"."""
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Green-function table
# ---------------------------------------------------------------------------

_DOUBLE_ROOT_REL = 1e-6  # switch to the limit branch when |lam+-lam-| < this * beta


def _green_numpy(alpha, beta, K, mu, xi, t):
    xi = np.asarray(xi, dtype=np.float64)
    xi2 = xi * xi
    b = beta + mu * xi2
    disc = b * b - 2.0 * alpha * K * xi2
    sep = np.sqrt(np.abs(disc))  # |lam+ - lam-| in both branches
    g1 = np.empty_like(xi2)
    g2 = np.empty_like(xi2)
    g3 = np.empty_like(xi2)

    near = sep < _DOUBLE_ROOT_REL * beta
    osc = (~near) & (disc < 0.0)
    real = ~(near | osc)

    if np.any(near):
        lam_t = -0.5 * b[near] * t
        e = np.exp(lam_t)
        g1[near] = t * e
        g2[near] = (1.0 + lam_t) * e
        g3[near] = (1.0 - lam_t) * e
    if np.any(real):
        d = sep[real]
        bb = b[real]
        lam_p = -alpha * K * xi2[real] / (bb + d)
        lam_m = -0.5 * (bb + d)
        ep = np.exp(lam_p * t)
        em1 = np.expm1(-d * t)
        g1[real] = ep * (-em1) / d
        g2[real] = ep * (1.0 - lam_m * em1 / d)
        g3[real] = ep * (1.0 + lam_p * em1 / d)
    if np.any(osc):
        w = 0.5 * sep[osc]
        e = np.exp(-0.5 * b[osc] * t)
        sn = np.sin(w * t)
        cs = np.cos(w * t)
        half_b = 0.5 * b[osc]
        g1[osc] = e * sn / w
        g2[osc] = e * (cs - half_b * sn / w)
        g3[osc] = e * (cs + half_b * sn / w)
    return g1, g2, g3


@njit(cache=True)
def _green_numba(alpha, beta, K, mu, xi, t):  # pragma: no cover - jit body
    m = xi.shape[0]
    g1 = np.empty(m)
    g2 = np.empty(m)
    g3 = np.empty(m)
    tol = _DOUBLE_ROOT_REL * beta
    for i in range(m):
        xi2 = xi[i] * xi[i]
        b = beta + mu * xi2
        disc = b * b - 2.0 * alpha * K * xi2
        sep = math.sqrt(abs(disc))
        if sep < tol:
            lam_t = -0.5 * b * t
            e = math.exp(lam_t)
            g1[i] = t * e
            g2[i] = (1.0 + lam_t) * e
            g3[i] = (1.0 - lam_t) * e
        elif disc > 0.0:
            d = sep
            lam_p = -alpha * K * xi2 / (b + d)
            lam_m = -0.5 * (b + d)
            ep = math.exp(lam_p * t)
            em1 = math.expm1(-d * t)
            g1[i] = ep * (-em1) / d
            g2[i] = ep * (1.0 - lam_m * em1 / d)
            g3[i] = ep * (1.0 + lam_p * em1 / d)
        else:
            w = 0.5 * sep
            e = math.exp(-0.5 * b * t)
            sn = math.sin(w * t)
            cs = math.cos(w * t)
            g1[i] = e * sn / w
            g2[i] = e * (cs - 0.5 * b * sn / w)
            g3[i] = e * (cs + 0.5 * b * sn / w)
    return g1, g2, g3


def green_table(alpha: float, beta: float, K: float, mu: float, xi, t: float):
    """G1, G2, G3 at wavenumber magnitudes `xi` (array) and a single time t."""
    xi = np.ascontiguousarray(np.atleast_1d(xi), dtype=np.float64)
    if _HAVE_NUMBA:
        return _green_numba(float(alpha), float(beta), float(K), float(mu), xi, float(t))
    return _green_numpy(float(alpha), float(beta), float(K), float(mu), xi, float(t))


# ---------------------------------------------------------------------------
# Classical 4th-order one-step oracle for the 2x2 mode system
#   u' = K xi s
#   s' = -(beta + mu xi^2) s - (alpha/2) xi u
# ---------------------------------------------------------------------------


def _rk4_numpy(alpha, beta, K, mu, xi, u0, s0, t, n_steps):
    xi = np.asarray(xi, dtype=np.float64)
    u = np.array(u0, dtype=np.complex128, copy=True)
    s = np.array(s0, dtype=np.complex128, copy=True)
    h = t / n_steps
    damp = beta + mu * xi * xi
    cu = K * xi
    cs = -0.5 * alpha * xi
    for _ in range(n_steps):
        ku1 = cu * s
        ks1 = cs * u - damp * s
        u1 = u + 0.5 * h * ku1
        s1 = s + 0.5 * h * ks1
        ku2 = cu * s1
        ks2 = cs * u1 - damp * s1
        u2 = u + 0.5 * h * ku2
        s2 = s + 0.5 * h * ks2
        ku3 = cu * s2
        ks3 = cs * u2 - damp * s2
        u3 = u + h * ku3
        s3 = s + h * ks3
        ku4 = cu * s3
        ks4 = cs * u3 - damp * s3
        u = u + (h / 6.0) * (ku1 + 2.0 * (ku2 + ku3) + ku4)
        s = s + (h / 6.0) * (ks1 + 2.0 * (ks2 + ks3) + ks4)
    return u, s


@njit(cache=True)
def _rk4_numba(alpha, beta, K, mu, xi, u0, s0, t, n_steps):  # pragma: no cover
    m = xi.shape[0]
    u_out = np.empty(m, dtype=np.complex128)
    s_out = np.empty(m, dtype=np.complex128)
    h = t / n_steps
    for i in range(m):
        damp = beta + mu * xi[i] * xi[i]
        cu = K * xi[i]
        cs = -0.5 * alpha * xi[i]
        u = u0[i]
        s = s0[i]
        for _ in range(n_steps):
            ku1 = cu * s
            ks1 = cs * u - damp * s
            u1 = u + 0.5 * h * ku1
            s1 = s + 0.5 * h * ks1
            ku2 = cu * s1
            ks2 = cs * u1 - damp * s1
            u2 = u + 0.5 * h * ku2
            s2 = s + 0.5 * h * ks2
            ku3 = cu * s2
            ks3 = cs * u2 - damp * s2
            u3 = u + h * ku3
            s3 = s + h * ks3
            ku4 = cu * s3
            ks4 = cs * u3 - damp * s3
            u = u + (h / 6.0) * (ku1 + 2.0 * (ku2 + ku3) + ku4)
            s = s + (h / 6.0) * (ks1 + 2.0 * (ks2 + ks3) + ks4)
        u_out[i] = u
        s_out[i] = s
    return u_out, s_out


def rk4_evolve(alpha, beta, K, mu, xi, u0, s0, t: float, n_steps: int):
    """Integrate the mode system from 0 to t in n_steps uniform RK4 steps.

    xi, u0, s0 are matching 1-d arrays (one independent mode per entry).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    xi = np.ascontiguousarray(np.atleast_1d(xi), dtype=np.float64)
    u0 = np.ascontiguousarray(np.atleast_1d(u0), dtype=np.complex128)
    s0 = np.ascontiguousarray(np.atleast_1d(s0), dtype=np.complex128)
    if _HAVE_NUMBA:
        return _rk4_numba(
            float(alpha), float(beta), float(K), float(mu), xi, u0, s0, float(t), int(n_steps)
        )
    return _rk4_numpy(
        float(alpha), float(beta), float(K), float(mu), xi, u0, s0, float(t), int(n_steps)
    )
