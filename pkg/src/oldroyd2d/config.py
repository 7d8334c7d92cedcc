"""Line-based run configuration: sections of key = value pairs.

Unknown sections or keys are errors, every key has a default, and the
resolved configuration renders to a canonical echo whose SHA-256 prefix is
the run id.  Identical configurations therefore map to identical run ids.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .grid import DEFAULT_PERIOD


class ConfigError(ValueError):
    """Malformed configuration text, unknown key, or invalid value."""


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def _parse_float_list(s: str) -> tuple:
    items = [x.strip() for x in s.split(",") if x.strip()]
    try:
        return tuple(float(x) for x in items)
    except ValueError as err:
        raise ConfigError(f"expected a comma-separated float list, got {s!r}") from err


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# key -> (default, parser)
SCHEMA: dict[str, dict[str, tuple]] = {
    "physics": {
        "alpha": (1.0, float),
        "beta": (1.0, float),
        "K": (1.0, float),
        "mu": (0.0, float),
    },
    "grid": {
        "n": (128, int),
        "L": (DEFAULT_PERIOD, float),
    },
    "init": {
        "kind": ("random", str),  # zero | random | taylor_green | file
        "h3_norm": (0.01, float),
        "seed": (1, int),
        "band": (0.0, float),  # 0 -> half the resolved range
        "tau_weight": (0.5, float),
        "file": ("", str),
    },
    "step": {
        "dt": (0.001, float),
        "scheme": (4, int),
        "dealias_fraction": (2.0 / 3.0, float),
        "nonlinear": (True, _parse_bool),
    },
    "run": {
        "T": (1.0, float),
        "sample_every": (0.001, float),
        "checkpoint_every": (0.0, float),
    },
    "etas": {
        "eta1": (0.01, float),
        "eta4": (0.0, float),  # 0 -> default to eta3
    },
    "decay": {
        "window_lo": (100.0, float),
        "window_hi": (10000.0, float),
        "samples": (25, int),
        "u_amplitude": (1.0, float),
        "sigma_amplitude": (1.0, float),
        "width": (1.0, float),
        "rel_tol": (1e-9, float),
        "slope_tol": (0.05, float),
        "ratio_bound": (10.0, float),
    },
    "sweep": {
        "mus": ((0.1, 0.01, 0.001, 0.0001, 0.0), _parse_float_list),
    },
    "validate": {
        "xi_points": (65, int),
        "times": ((0.1, 1.0, 5.0, 10.0, 50.0), _parse_float_list),
        "include_critical": (False, _parse_bool),
        "corrupt_g2_sign": (False, _parse_bool),  # failure-path test fixture
        "gap_tol": (1e-8, float),
    },
    "output": {
        "root": ("", str),
    },
}


def default_config() -> dict:
    return {sec: {k: spec[0] for k, spec in keys.items()} for sec, keys in SCHEMA.items()}


def parse_config(text: str) -> dict:
    """Parse config text over the defaults; '#' starts a comment."""
    cfg = default_config()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside of any section")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {section}.{key}")
        parser = SCHEMA[section][key][1]
        try:
            cfg[section][key] = parser(value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as err:
            raise ConfigError(f"line {lineno}: bad value for {section}.{key}: {err}") from err
    return cfg


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_config(text)


def render_echo(cfg: dict) -> str:
    """Canonical text of the resolved configuration (schema order)."""
    lines = []
    for sec, keys in SCHEMA.items():
        lines.append(f"[{sec}]")
        for key in keys:
            lines.append(f"{key} = {_fmt(cfg[sec][key])}")
        lines.append("")
    return "\n".join(lines)


def run_id(cfg: dict) -> str:
    """Content hash of the resolved configuration."""
    return hashlib.sha256(render_echo(cfg).encode("utf-8")).hexdigest()[:16]
