"""Batch experiment drivers.

Subcommands
-----------
validate-green : closed-form mode propagator against the RK4 oracle
linear-decay   : decay exponents and lower-bound ratios of the linear system
simulate       : one nonlinear run with energy monitors and checkpoints
sweep-mu       : diffusivity sweep witnessing the uniform bound and the
                 vanishing-diffusion Cauchy gaps

Every run persists under <out>/<run_id>/ where run_id is the hash of the
resolved configuration: config.echo, series.csv, fits.json / summary.json /
sweep.json, checkpoints/, status.  CSV uses 17 significant digits so reruns
of the same configuration are byte-identical.

Exit codes: 0 success, 1 configuration error, 2 assertion failure,
3 blow-up.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import kernels
from .config import ConfigError
from .decay import (
    QuadratureError,
    decay_series,
    fit_decay_exponent,
    gaussian_profile,
    log_spaced_times,
    lower_bound_ratio,
)
from .grid import Grid
from .monitors import CSV_HEADER, EtaCoefficients, balance_rows, balance_residual, report_row, residual_column
from .operators import sobolev_norm, tensor_sobolev_norm
from .params import PhysParams
from .propagator import constants, green_table_rows
from .solver import (
    BlowUpError,
    CFLViolationError,
    SimState,
    StepConfig,
    load_checkpoint,
    new_state,
    random_state,
    run,
    save_checkpoint,
    taylor_green_state,
    with_params,
    zero_state,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ASSERT = 2
EXIT_BLOWUP = 3

ENV_OUTPUT_ROOT = "OLDROYD2D_RUNS"


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _params(cfg) -> PhysParams:
    ph = cfg["physics"]
    try:
        return PhysParams(ph["alpha"], ph["beta"], ph["K"], ph["mu"])
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _grid(cfg) -> Grid:
    g = cfg["grid"]
    try:
        return Grid(g["n"], g["L"])
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _etas(cfg) -> EtaCoefficients:
    e = cfg["etas"]
    eta4 = e["eta4"] if e["eta4"] > 0 else None
    try:
        return EtaCoefficients(e["eta1"], eta4)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _step_config(cfg) -> StepConfig:
    s = cfg["step"]
    try:
        return StepConfig(s["dt"], s["dealias_fraction"], s["scheme"], s["nonlinear"])
    except ValueError as err:
        raise ConfigError(str(err)) from err


def _initial_state(cfg, grid: Grid, params: PhysParams) -> SimState:
    init = cfg["init"]
    kind = init["kind"]
    if kind == "zero":
        return zero_state(grid, params)
    if kind == "random":
        return random_state(
            grid, params, init["h3_norm"], init["seed"], init["band"], init["tau_weight"]
        )
    if kind == "taylor_green":
        return taylor_green_state(grid, params, init["h3_norm"], init["tau_weight"])
    if kind == "file":
        if not init["file"]:
            raise ConfigError("init.kind = file requires init.file")
        state = load_checkpoint(init["file"])
        return with_params(new_state(state.grid, params, state.u, state.tau), params)
    raise ConfigError(f"unknown init.kind {kind!r}")


def _run_dir(cfg, out_flag) -> Path:
    root = out_flag or cfg["output"]["root"] or os.environ.get(ENV_OUTPUT_ROOT) or "runs"
    run_dir = Path(root) / cfgmod.run_id(cfg)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.echo").write_text(cfgmod.render_echo(cfg), encoding="utf-8")
    return run_dir


def _write_status(run_dir: Path, text: str) -> None:
    (run_dir / "status").write_text(text + "\n", encoding="utf-8")


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _write_series_csv(path: Path, params, samples) -> None:
    reports = residual_column(params, samples)
    lines = [CSV_HEADER]
    lines.extend(report_row(r) for r in reports)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _f17(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# validate-green
# ---------------------------------------------------------------------------


def _oracle_columns(p: PhysParams, xis: np.ndarray, t: float):
    """RK4 responses of the two unit basis states for every wavenumber."""
    rate = max(
        p.beta,
        math.sqrt(p.alpha * p.K) * float(xis.max()),
        p.mu * float(xis.max()) ** 2,
    )
    n_steps = max(1, math.ceil(t * rate / 0.005))
    ones = np.ones_like(xis, dtype=np.complex128)
    zeros = np.zeros_like(xis, dtype=np.complex128)
    u1, s1 = kernels.rk4_evolve(p.alpha, p.beta, p.K, p.mu, xis, ones, zeros, t, n_steps)
    u2, s2 = kernels.rk4_evolve(p.alpha, p.beta, p.K, p.mu, xis, zeros, ones, t, n_steps)
    return u1.real, s1.real, u2.real, s2.real


def validate_green(p: PhysParams, xis, ts, corrupt_g2_sign: bool = False):
    """Max absolute gap between the closed form and the oracle, per unit
    initial mode amplitude, over the (xi, t) sweep."""
    xis = np.asarray(xis, dtype=np.float64)
    max_gap = 0.0
    for t in ts:
        g1, g2, g3 = kernels.green_table(p.alpha, p.beta, p.K, p.mu, xis, t)
        if corrupt_g2_sign:
            g2 = -g2
        u1, s1, u2, s2 = _oracle_columns(p, xis, float(t))
        gap = np.max(
            np.stack(
                [
                    np.abs(g3 - u1),
                    np.abs(-0.5 * p.alpha * xis * g1 - s1),
                    np.abs(p.K * xis * g1 - u2),
                    np.abs(g2 - s2),
                ]
            )
        )
        max_gap = max(max_gap, float(gap))
    return max_gap


def cmd_validate_green(cfg, run_dir: Path) -> int:
    started = time.perf_counter()
    p = _params(cfg)
    v = cfg["validate"]
    c = constants(p)
    xis = np.linspace(0.0, 2.0 * c.R, v["xi_points"])
    if v["include_critical"]:
        xis = np.sort(np.append(xis, c.xi_c))
    ts = v["times"]

    max_gap = validate_green(p, xis, ts, v["corrupt_g2_sign"])

    rows = green_table_rows(p, xis, ts)
    lines = ["xi,t,G1,G2,G3,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus"]
    for xi, t, g1, g2, g3, lp, lm in rows:
        lines.append(
            ",".join(
                _f17(x)
                for x in (xi, t, g1, g2, g3, lp.real, lp.imag, lm.real, lm.imag)
            )
        )
    (run_dir / "green_table.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    elapsed = time.perf_counter() - started
    passed = max_gap < v["gap_tol"]
    _write_json(
        run_dir / "summary.json",
        {
            "command": "validate-green",
            "elapsed_seconds": elapsed,
            "gap_tol": v["gap_tol"],
            "max_gap": max_gap,
            "pass": bool(passed),
            "xi_count": int(xis.size),
            "times": list(ts),
        },
    )
    _write_status(run_dir, "completed" if passed else "aborted: gap exceedance")
    print(f"validate-green: max gap {max_gap:.3e} (tol {v['gap_tol']:g}) in {elapsed:.1f}s")
    return EXIT_OK if passed else EXIT_ASSERT


# ---------------------------------------------------------------------------
# linear-decay
# ---------------------------------------------------------------------------


def _decay_targets(branch: str, k: int) -> float:
    return (-0.5 - 0.5 * k) if branch == "u" else (-1.0 - 0.5 * k)


def cmd_linear_decay(cfg, run_dir: Path) -> int:
    p = _params(cfg)
    d = cfg["decay"]
    profile = gaussian_profile(d["u_amplitude"], d["sigma_amplitude"], d["width"])
    if not profile.c2 > 0:
        raise ConfigError("lower-bound mode requires a profile with c2 > 0")

    window = (d["window_lo"], d["window_hi"])
    times = log_spaced_times(window[0], window[1], d["samples"])
    t1 = constants(p).t1
    ratio_start = max(t1, window[0])

    fits = []
    ratios = []
    series_lines = ["t,value,k,branch"]
    slopes = {}
    try:
        for branch in ("u", "sigma"):
            for k in range(4):
                s = decay_series(p, profile, k, branch, times, d["rel_tol"])
                for t, vv in zip(s.times, s.values):
                    series_lines.append(f"{_f17(t)},{_f17(vv)},{k},{branch}")
                fit = fit_decay_exponent(s, window)
                target = _decay_targets(branch, k)
                slopes[(branch, k)] = fit.slope
                fits.append(
                    {
                        "branch": branch,
                        "k": k,
                        "slope": fit.slope,
                        "stderr": fit.stderr,
                        "target": target,
                        "window": list(fit.window),
                        "within_tol": bool(abs(fit.slope - target) <= d["slope_tol"]),
                    }
                )
                lo_r, hi_r = lower_bound_ratio(s, target, ratio_start)
                ratios.append(
                    {
                        "branch": branch,
                        "k": k,
                        "min_ratio": lo_r,
                        "max_ratio": hi_r,
                        "spread": hi_r / lo_r,
                    }
                )
    except QuadratureError as err:
        (run_dir / "series.csv").write_text("\n".join(series_lines) + "\n", encoding="utf-8")
        _write_status(run_dir, f"aborted: {err}")
        print(f"linear-decay: aborted, {err}")
        return EXIT_ASSERT

    slope_ok = all(f["within_tol"] for f in fits)
    # slopes must drop by 1/2 per derivative order on both branches
    steps_ok = all(
        abs(slopes[(b, k + 1)] - slopes[(b, k)] + 0.5) <= d["slope_tol"]
        for b in ("u", "sigma")
        for k in range(3)
    )
    ratio_ok = all(r["spread"] <= d["ratio_bound"] for r in ratios if r["branch"] == "u")
    asymptotic = window[0] >= 100.0
    passed = slope_ok and steps_ok and ratio_ok

    (run_dir / "series.csv").write_text("\n".join(series_lines) + "\n", encoding="utf-8")
    _write_json(
        run_dir / "fits.json",
        {
            "command": "linear-decay",
            "asymptotic_window": bool(asymptotic),
            "fits": fits,
            "lower_bound_ratios": ratios,
            "pass": bool(passed),
            "ratio_start": ratio_start,
            "slope_tol": d["slope_tol"],
            "ratio_bound": d["ratio_bound"],
        },
    )
    _write_status(run_dir, "completed" if passed else "aborted: decay assertions failed")
    verdict = "pass" if passed else "FAIL"
    print(
        f"linear-decay: slopes {'ok' if slope_ok else 'BAD'}, "
        f"ratio spreads {'ok' if ratio_ok else 'BAD'}, "
        f"window asymptotic={asymptotic} -> {verdict}"
    )
    return EXIT_OK if passed else EXIT_ASSERT


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _monotone_verdict(values, tol: float = 1e-10):
    worst = 0.0
    for a, b in zip(values, values[1:]):
        worst = max(worst, b - a)
    return bool(worst <= tol), worst


def cmd_simulate(cfg, run_dir: Path) -> int:
    p = _params(cfg)
    grid = _grid(cfg)
    etas = _etas(cfg)
    step_cfg = _step_config(cfg)
    r = cfg["run"]
    state0 = _initial_state(cfg, grid, p)

    ckpt_dir = run_dir / "checkpoints"
    ckpt_dir.mkdir(exist_ok=True)
    rid = cfgmod.run_id(cfg)

    ckpt_every = r["checkpoint_every"]
    next_ckpt = ckpt_every if ckpt_every > 0 else math.inf
    counter = [0]
    last_state: list[SimState] = [state0]

    def on_sample(state: SimState) -> None:
        nonlocal next_ckpt
        last_state[0] = state
        if state.t >= next_ckpt - 1e-12:
            save_checkpoint(ckpt_dir / f"t{counter[0]:05d}.ckpt", state, rid)
            counter[0] += 1
            next_ckpt += ckpt_every

    status = "completed"
    code = EXIT_OK
    try:
        samples = run(state0, step_cfg, r["T"], r["sample_every"], etas, on_sample)
    except BlowUpError as err:
        samples = err.partial
        status = f"aborted: blow-up at t = {err.time:.6g}"
        code = EXIT_BLOWUP
    except CFLViolationError as err:
        _write_status(run_dir, f"aborted: {err}")
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as err:
        raise ConfigError(str(err)) from err

    _write_series_csv(run_dir / "series.csv", p, samples)

    summary = {"command": "simulate", "run_id": rid, "status": status, "samples": len(samples)}
    if samples:
        h1 = [rep.H[0] for _, rep in samples]
        h2 = [rep.H[1] for _, rep in samples]
        h3 = [rep.H[2] for _, rep in samples]
        pair = [
            math.sqrt(sum(v * v for v in rep.u_norms) + sum(v * v for v in rep.tau_norms))
            for _, rep in samples
        ]
        mono = {
            name: {"nonincreasing": ok, "max_increase": worst}
            for name, (ok, worst) in (
                ("H1", _monotone_verdict(h1)),
                ("H2", _monotone_verdict(h2)),
                ("H3", _monotone_verdict(h3)),
            )
        }
        summary.update(
            {
                "initial_pair_h3": pair[0],
                "sup_pair_h3": max(pair),
                "final_t": samples[-1][0],
                "monotonicity": mono,
            }
        )
        if len(samples) >= 3:
            summary["max_balance_residual"] = balance_residual(balance_rows(p, samples))
    if status == "completed":
        save_checkpoint(ckpt_dir / "final.ckpt", last_state[0], rid)
    _write_json(run_dir / "summary.json", summary)
    _write_status(run_dir, status)
    print(f"simulate: {status}, {len(samples)} samples -> {run_dir}")
    return code


# ---------------------------------------------------------------------------
# sweep-mu
# ---------------------------------------------------------------------------


def cmd_sweep_mu(cfg, run_dir: Path) -> int:
    p0 = _params(cfg)
    grid = _grid(cfg)
    etas = _etas(cfg)
    step_cfg = _step_config(cfg)
    r = cfg["run"]
    mus = list(cfg["sweep"]["mus"])
    if not mus:
        raise ConfigError("sweep.mus must not be empty")
    if any(b >= a for a, b in zip(mus, mus[1:])):
        raise ConfigError("sweep.mus must be strictly decreasing")
    if mus[-1] < 0:
        raise ConfigError("sweep.mus must be nonnegative")

    base = _initial_state(cfg, grid, p0.replace_mu(mus[0]))

    sup_h3 = []
    dissipation = []
    mu_dissipation = []
    finals = []
    status = "completed"
    code = EXIT_OK

    for i, mu in enumerate(mus):
        params = p0.replace_mu(mu)
        state_mu = with_params(base, params)
        trace_t, trace_q, trace_mu, final_u = [], [], [], [None]

        def on_sample(state: SimState) -> None:
            grad_u_h2 = sum(sobolev_norm(grid, state.u, k) ** 2 for k in (1, 2, 3))
            tau_h3 = sum(tensor_sobolev_norm(grid, state.tau, k) ** 2 for k in range(4))
            grad_tau_h3 = sum(tensor_sobolev_norm(grid, state.tau, k) ** 2 for k in (1, 2, 3, 4))
            trace_t.append(state.t)
            trace_q.append(grad_u_h2 + tau_h3 + mu * grad_tau_h3)
            trace_mu.append(mu * grad_tau_h3)
            final_u[0] = state.u

        try:
            samples = run(state_mu, step_cfg, r["T"], r["sample_every"], etas, on_sample)
        except BlowUpError as err:
            samples = err.partial
            status = f"aborted: blow-up at mu = {mu:g}, t = {err.time:.6g}"
            code = EXIT_BLOWUP
        except CFLViolationError as err:
            _write_status(run_dir, f"aborted: {err}")
            print(f"config error: {err}", file=sys.stderr)
            return EXIT_CONFIG
        _write_series_csv(run_dir / f"series_mu{i}.csv", params, samples)
        if code == EXIT_BLOWUP:
            break
        pair = [
            math.sqrt(sum(v * v for v in rep.u_norms) + sum(v * v for v in rep.tau_norms))
            for _, rep in samples
        ]
        sup_h3.append(max(pair))
        dissipation.append(float(np.trapezoid(trace_q, trace_t)))
        mu_dissipation.append(float(np.trapezoid(trace_mu, trace_t)))
        finals.append(final_u[0])

    gaps = [
        float(np.sqrt(np.sum(np.abs(a - b) ** 2)))
        for a, b in zip(finals, finals[1:])
    ]
    payload = {
        "command": "sweep-mu",
        "mus": mus[: len(sup_h3)],
        "sup_h3": sup_h3,
        "dissipation_integrals": dissipation,
        "mu_dissipation_integrals": mu_dissipation,
        "pairwise_gaps": gaps,
        "status": status,
    }
    if code == EXIT_BLOWUP:
        _write_json(run_dir / "sweep.json", payload)
        _write_status(run_dir, status)
        print(f"sweep-mu: {status}")
        return code

    spread = (max(sup_h3) - min(sup_h3)) / min(sup_h3) if min(sup_h3) > 0 else 0.0
    gaps_decreasing = all(a > b for a, b in zip(gaps, gaps[1:]))
    passed = spread <= 0.10 and gaps_decreasing
    payload.update(
        {"spread": spread, "gaps_strictly_decreasing": gaps_decreasing, "pass": bool(passed)}
    )
    _write_json(run_dir / "sweep.json", payload)
    if not passed:
        status = "aborted: sweep assertions failed"
        code = EXIT_ASSERT
    _write_status(run_dir, status)
    print(
        f"sweep-mu: spread {spread:.3%}, gaps decreasing={gaps_decreasing} "
        f"-> {'pass' if passed else 'FAIL'}"
    )
    return code


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "validate-green": cmd_validate_green,
    "linear-decay": cmd_linear_decay,
    "simulate": cmd_simulate,
    "sweep-mu": cmd_sweep_mu,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oldroyd2d", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="path to a key = value config file")
        sp.add_argument("--out", default=None, help="output root (default env "
                        f"{ENV_OUTPUT_ROOT} or ./runs)")
        sp.add_argument("--threads", type=int, default=0,
                        help="worker threads for jit kernels (results are thread-count independent)")
        sp.add_argument("--seed", type=int, default=None, help="override init.seed")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads > 0 and kernels.backend() == "numba":
        import numba

        try:
            numba.set_num_threads(args.threads)
        except ValueError:
            pass
    try:
        cfg = cfgmod.load_config(args.config) if args.config else cfgmod.default_config()
        if args.seed is not None:
            cfg["init"]["seed"] = args.seed
        run_dir = _run_dir(cfg, args.out)
        return _COMMANDS[args.command](cfg, run_dir)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except CFLViolationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:  # console script
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
