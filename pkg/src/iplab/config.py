"""Run configuration: command-line flags layered over an optional config file.

Config files hold flat ``key = value`` lines; ``#`` starts a comment and
list values are comma separated. Flags win over file values, file values
win over built-in defaults.
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field
from typing import Optional

from .experiments import (AXES, DEFAULT_EPS_POINTS, DEFAULT_LF_POINTS,
                          DEFAULT_REPLICAS, DEFAULT_SIZES, TARGETS)
from .figures import FIGURES
from .results import FORMAT_VERSION

COMMANDS = ("spectrum", "states", "ipr", "variational", "sweep", "scaling",
            "disorder", "figure")

# key -> (parser for one value, is_list)
PARAMS = {
    "n_cells": (int, False),
    "lf": (float, False),
    "eps": (float, False),
    "d1": (float, False),
    "d2": (float, False),
    "seed": (int, False),
    "bins": (int, False),
    "out_dir": (str, False),
    "sizes": (int, True),
    "points": (float, True),
    "replicas": (int, False),
    "strength": (float, True),
    "axis": (str, False),
    "target": (str, False),
    "which": (str, False),
}

DEFAULTS = {
    "n_cells": 151,
    "lf": 1.0,
    "eps": 0.3,
    "d1": 1.0,
    "d2": 2.0,
    "seed": 0,
    "bins": 200,
    "out_dir": "results",
    "sizes": DEFAULT_SIZES,
    "replicas": 1,
    "strength": (0.0, 0.02, 0.05, 0.1, 0.15),
    "axis": "lf",
    "target": "mean_AC",
    "which": "fig1",
}
# a bare `spectrum` run is the N_s = 4002 baseline spectrum
COMMAND_DEFAULTS = {"spectrum": {"n_cells": 2001}, "disorder": {"replicas": DEFAULT_REPLICAS}}
AXIS_POINTS = {
    "lf": DEFAULT_LF_POINTS,
    "epsilon": DEFAULT_EPS_POINTS,
    "n_sites": tuple(float(s) for s in DEFAULT_SIZES),
    "disorder_p": (0.0, 0.02, 0.05, 0.1, 0.15),
}


class UsageError(ValueError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __getitem__(self, key):
        return self.params[key]

    def as_dict(self) -> dict:
        return {"command": self.command, "params": dict(self.params),
                "format_version": self.format_version}


def _convert(key, raw):
    kind, is_list = PARAMS[key]
    if isinstance(raw, str):
        parts = [p.strip() for p in raw.split(",")] if is_list else [raw.strip()]
    elif is_list:
        parts = list(raw)
    else:
        parts = [raw]
    try:
        vals = [kind(p) for p in parts if not (isinstance(p, str) and p == "")]
    except (TypeError, ValueError):
        raise UsageError(key, f"cannot parse {raw!r} as {kind.__name__}") from None
    if kind is float and not all(math.isfinite(v) for v in vals):
        raise UsageError(key, "must be finite")
    if is_list:
        if not vals:
            raise UsageError(key, "empty list")
        return tuple(vals)
    if len(vals) != 1:
        raise UsageError(key, f"expected one value, got {raw!r}")
    return vals[0]


def read_config_file(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError("config", f"cannot read {path}: {exc}") from None
    return parse_config_text(text)


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("config", f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARAMS:
            raise UsageError(key, "unknown key")
        out[key] = _convert(key, value)
    return out


def dump_config_text(config: RunConfig) -> str:
    lines = [f"# iplab {config.command} (format {config.format_version})"]
    for key in sorted(config.params):
        lines.append(f"{key} = {_flag_value(config.params[key])}")
    return "\n".join(lines) + "\n"


def _flag_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_flag_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def validate(command: str, p: dict):
    """Check every parameter against the preconditions of the operations it feeds."""
    if p["n_cells"] < 2:
        raise UsageError("n_cells", "must be >= 2")
    if not p["lf"] > 0:
        raise UsageError("lf", "must be > 0")
    if p["eps"] < 0:
        raise UsageError("eps", "must be >= 0")
    if not p["d1"] < p["d2"]:
        raise UsageError("d2", "must be greater than d1")
    if p["seed"] < 0:
        raise UsageError("seed", "must be >= 0")
    if p["bins"] < 1:
        raise UsageError("bins", "must be >= 1")
    if p["replicas"] < 1:
        raise UsageError("replicas", "must be >= 1")
    if p["axis"] not in AXES:
        raise UsageError("axis", f"must be one of {', '.join(AXES)}")
    if p["target"] not in TARGETS:
        raise UsageError("target", f"must be one of {', '.join(TARGETS)}")
    if p["which"] not in FIGURES:
        raise UsageError("which", f"must be one of {', '.join(FIGURES)}")
    if any(s < 4 or s % 2 for s in p["sizes"]):
        raise UsageError("sizes", "every size must be an even number of sites >= 4")
    if command == "scaling" and len(p["sizes"]) < 3:
        raise UsageError("sizes", "scaling needs at least 3 sizes")
    if any(not 0 <= s <= 0.2 for s in p["strength"]):
        raise UsageError("strength", "disorder strengths must lie in [0, 0.2]")
    pts = p["points"]
    if list(pts) != sorted(pts):
        raise UsageError("points", "must be sorted ascending")
    axis = p["axis"]
    if axis == "lf" and any(v <= 0 for v in pts):
        raise UsageError("points", "L_f values must be > 0")
    if axis == "epsilon" and any(v < 0 for v in pts):
        raise UsageError("points", "epsilon values must be >= 0")
    if axis == "n_sites" and any(v < 4 or v % 2 for v in pts):
        raise UsageError("points", "N_s values must be even and >= 4")
    if axis == "disorder_p" and any(not 0 <= v < 1 for v in pts):
        raise UsageError("points", "disorder strengths must lie in [0, 1)")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(None, message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iplab", description="Isospectrally patterned lattice lab")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value config file")
    for key, (kind, is_list) in PARAMS.items():
        parser.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                            metavar="LIST" if is_list else kind.__name__.upper())
    return parser


def parse_config(argv, config_file: Optional[str] = None) -> RunConfig:
    """Merge defaults, config file and flags into a validated :class:`RunConfig`."""
    ns = build_parser().parse_args(list(argv))
    params = dict(DEFAULTS)
    params.update(COMMAND_DEFAULTS.get(ns.command, {}))
    path = config_file or ns.config
    if path:
        params.update(read_config_file(path))
    for key in PARAMS:
        raw = getattr(ns, key)
        if raw is not None:
            params[key] = _convert(key, raw)
    if "points" not in params:
        params["points"] = AXIS_POINTS.get(params["axis"], ())
    validate(ns.command, params)
    return RunConfig(ns.command, params)


def to_argv(config: RunConfig) -> list:
    """Flags that reproduce ``config`` through :func:`parse_config`."""
    argv = [config.command]
    for key in sorted(config.params):
        argv += ["--" + key.replace("_", "-"), _flag_value(config.params[key])]
    return argv
