"""
Command-line parsing.

Precedence, lowest first: built-in defaults, environment (CustomSettings),
the --config file, explicit flags.
"""
from __future__ import annotations

import argparse
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from app import __version__
from app.config import settings
from app.schemas import ModelParams, RunConfig, SweepAxis, coerce_alpha
from app.utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

PARAM_KEYS = ("a", "sigma", "eps", "tau", "d", "k1", "k2", "alpha", "ell")


def _alpha(value: str) -> float:
    return float(coerce_alpha(value))


def _flag(value: str | bool) -> bool:
    if isinstance(value, bool):
        return value
    lowered = value.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"expected a boolean, got '{value}'")


def parse_axis(value: str) -> SweepAxis:
    """'name:min:max:count[:log][:rel=rho0|gamma0|alpha0]'."""
    parts = [part.strip() for part in value.split(":")]
    if len(parts) < 4:
        raise ValueError(f"axis '{value}' must look like name:min:max:count[:log][:rel=rho0]")
    payload: dict[str, Any] = {
        "name": parts[0],
        "min": float(parts[1]),
        "max": float(parts[2]),
        "count": int(parts[3]),
    }
    for extra in parts[4:]:
        if extra in {"log", "linear"}:
            payload["scale"] = extra
        elif extra.startswith("rel="):
            payload["relative_to"] = extra.removeprefix("rel=")
        else:
            raise ValueError(f"unknown axis modifier '{extra}' in '{value}'")
    return SweepAxis(**payload)


@dataclass(slots=True, frozen=True)
class Option:
    dest: str
    type: Callable[[str], Any] | None = None
    default: Any = None
    help: str = ""
    choices: tuple[str, ...] | None = None
    flag: bool = False
    repeat: bool = False
    positional: bool = False

    @property
    def switch(self) -> str:
        return "--" + self.dest.replace("_", "-")

    def convert(self, raw: str) -> Any:
        if self.flag:
            return _flag(raw)
        if self.repeat:
            return [self.type(item) for item in raw.split(";") if item.strip()]
        value = self.type(raw) if self.type else raw
        if self.choices and value not in self.choices:
            raise ValueError(f"'{raw}' is not one of {', '.join(self.choices)}")
        return value


COMMON_OPTIONS = (
    Option("a", float, help="Feed constant"),
    Option("sigma", float, help="Complexing factor"),
    Option("eps", float, help="Activator diffusion scale"),
    Option("tau", float, help="Activator time constant"),
    Option("d", float, help="Inhibitor diffusion rate"),
    Option("k1", float, help="Activator exchange rate"),
    Option("k2", float, help="Inhibitor exchange rate"),
    Option("alpha", _alpha, help="Delay kernel rate; 'inf' for instantaneous exchange"),
    Option("ell", float, help="Domain length"),
    Option("kappa_method", str, "extrapolated", "How kappa* is obtained", ("extrapolated", "inner")),
    Option("output", Path, help="Output file; stdout when omitted"),
    Option("output_format", str, None, "Output format", ("json", "csv")),
    Option("cache_dir", Path, help="Cache directory (env LE_CACHE_DIR)"),
    Option("no_cache", flag=True, default=False, help="Disable the constants cache"),
    Option("workers", int, help="Worker processes for sweeps"),
    Option("seed", int, 0, "Seed for perturbation noise"),
    Option("log_level", str, help="Logging level"),
)

COMMAND_OPTIONS: dict[str, tuple[Option, ...]] = {
    "nullclines": (Option("points", int, 201, "Samples per branch"),),
    "reduced": (Option("nodes", int, help="Nodes per side of the sampled profile"),),
    "steady": (
        Option("nodes", int, help="Grid nodes"),
        Option("initial", str, "layered", "Starting guess", ("layered", "constant")),
    ),
    "spectral": (
        Option("modes", int, help="Retained slow modes"),
        Option("nodes", int, help="Slow operator grid nodes"),
        Option("fast", flag=True, default=False, help="Also report the fast spectrum at eps"),
    ),
    "constants": (),
    "turing-curve": (
        Option("k1_min", float, 0.0, "Lower end of the k1 range"),
        Option("k1_max", float, 0.49, "Upper end of the k1 range"),
        Option("count", int, 25, "Number of k1 samples"),
        Option("relative_to", str, "rho0", "Interpret the k1 range as multiples of", ("none", "rho0")),
    ),
    "hopf": (Option("no_transversality", flag=True, default=False, help="Skip the crossing-speed computation"),),
    "classify": (),
    "simulate": (
        Option("system", str, "coupled4", "System to integrate", ("decoupled2", "coupled4", "coupled6_delayed")),
        Option("t_end", float, 50.0, "Final time"),
        Option("nodes", int, 401, "Uniform grid nodes"),
        Option("dt", float, help="Time step"),
        Option("mode", str, "antisymmetric", "Perturbed mode", ("none", "symmetric", "antisymmetric")),
        Option("shape", str, "bump", "Perturbation shape", ("bump", "eigenfunction")),
        Option("amplitude", float, 1e-4, "Perturbation amplitude"),
        Option("width_eps", float, 5.0, "Bump width in units of eps"),
        Option("noise", float, 0.0, "Relative nodal noise"),
        Option("stride", int, 10, "Diagnostics stride in steps"),
        Option("snapshot_stride", int, help="Field snapshot stride in steps"),
        Option("initial", str, "layered", "Base state", ("layered", "constant")),
    ),
    "scan": (
        Option("param", str, None, "Scanned parameter", ("tau", "k2", "alpha")),
        Option("min", float, help="Bracket lower end"),
        Option("max", float, help="Bracket upper end"),
        Option("method", str, "eigs", "Stability test", ("eigs", "simulate", "both")),
        Option("system", str, "coupled4", "System", ("decoupled2", "coupled4", "coupled6_delayed")),
        Option("rtol", float, 1e-3, "Relative bisection tolerance"),
        Option("nodes", int, 401, "Simulation grid nodes"),
        Option("t_end", float, 50.0, "Simulation final time"),
    ),
    "sweep": (
        Option("task", str, "classify", "Per-point task", ("classify", "turing-curve", "hopf", "lambda-curves")),
        Option("axis", parse_axis, help="name:min:max:count[:log][:rel=rho0]; repeatable", repeat=True),
    ),
    "validate": (Option("suite", str, None, "Check suite", ("model", "profile", "spectral", "slep"), positional=True),),
}

REQUIRED: dict[str, tuple[str, ...]] = {
    "hopf": ("k1", "k2"),
    "classify": ("k1", "k2"),
    "scan": ("param", "min", "max"),
    "sweep": ("axis",),
    "validate": ("suite",),
}


def _add_option(parser: argparse.ArgumentParser, option: Option) -> None:
    if option.positional:
        parser.add_argument(option.dest, choices=option.choices, help=option.help)
        return
    kwargs: dict[str, Any] = {"dest": option.dest, "default": argparse.SUPPRESS, "help": option.help}
    if option.flag:
        kwargs["action"] = "store_true"
    else:
        kwargs["type"] = option.type or str
        if option.choices:
            kwargs["choices"] = option.choices
        if option.repeat:
            kwargs["action"] = "append"
    parser.add_argument(option.switch, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="key = value file; unknown keys are errors")
    for option in COMMON_OPTIONS:
        _add_option(common, option)

    parser = argparse.ArgumentParser(
        prog="le-layers",
        description="Layered states, Turing curves and delayed-coupling Hopf points of the two-layer Lengyel-Epstein system.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, options in COMMAND_OPTIONS.items():
        sub = subparsers.add_parser(command, parents=[common], help=f"{command} subcommand")
        for option in options:
            _add_option(sub, option)
    return parser


def _options_for(command: str) -> dict[str, Option]:
    return {option.dest: option for option in (*COMMON_OPTIONS, *COMMAND_OPTIONS[command])}


def read_config_file(path: Path, command: str) -> dict[str, Any]:
    """Parse 'key = value' lines; '#' starts a comment, blank lines are skipped."""
    options = _options_for(command)
    values: dict[str, Any] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}", path=str(path)) from exc
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{number}: expected 'key = value'", line=raw)
        key, value = (part.strip() for part in line.split("=", 1))
        dest = key.replace("-", "_")
        if dest == "format":
            dest = "output_format"
        if dest not in options:
            raise ConfigurationError(f"{path}:{number}: unknown key '{key}'", key=key)
        try:
            values[dest] = options[dest].convert(value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{number}: invalid value for '{key}': {exc}", key=key) from exc
    logger.debug("Read %d keys from %s", len(values), path)
    return values


def parse_cli(argv: Sequence[str] | None = None) -> RunConfig:
    """Resolve argv (and an optional config file) into a RunConfig."""
    namespace = vars(build_parser().parse_args(argv))
    command = namespace.pop("command")
    config_path = namespace.pop("config", None)
    explicit = namespace
    file_values = read_config_file(config_path, command) if config_path else {}

    if "no_cache" in explicit and "cache_dir" in explicit and explicit["no_cache"]:
        raise ConfigurationError("conflicting flags: --no-cache and --cache-dir")
    if command == "simulate" and explicit.get("system") == "coupled4" and math.isfinite(explicit.get("alpha", math.inf)):
            raise ConfigurationError("conflicting flags: --alpha is finite but --system coupled4 has no delay")

    defaults = {option.dest: option.default for option in _options_for(command).values() if option.default is not None}
    merged = {**defaults, **file_values, **explicit}
    missing = [key for key in REQUIRED.get(command, ()) if key not in merged]
    if missing:
        raise ConfigurationError(
            f"{command} needs {', '.join('--' + key.replace('_', '-') for key in missing)}",
            missing=missing,
        )

    try:
        params = ModelParams(**{key: merged.pop(key) for key in PARAM_KEYS if key in merged})
    except ValidationError as exc:
        raise ConfigurationError(f"invalid parameters: {exc.errors(include_url=False)}") from exc

    output = merged.pop("output", None)
    output_format = merged.pop("output_format", None)
    if output_format is None:
        output_format = "csv" if output is not None and Path(output).suffix == ".csv" else "json"
    no_cache = merged.pop("no_cache", False)
    cache_dir = merged.pop("cache_dir", settings.cache_dir)
    workers = merged.pop("workers", settings.workers)
    seed = merged.pop("seed", 0)
    log_level = merged.pop("log_level", None)
    if log_level is not None:
        merged["log_level"] = log_level.upper()

    return RunConfig(
        command=command,
        params=params,
        payload=merged,
        output=output,
        output_format=output_format,
        cache_dir=cache_dir,
        cache_enabled=settings.cache_enabled and not no_cache,
        workers=workers,
        seed=seed,
    )


__all__ = [
    "PARAM_KEYS",
    "Option",
    "COMMON_OPTIONS",
    "COMMAND_OPTIONS",
    "parse_axis",
    "build_parser",
    "read_config_file",
    "parse_cli",
]
