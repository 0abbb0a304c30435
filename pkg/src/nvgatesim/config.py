"""Strict plain-text experiment configuration.

Format: ``key = value`` lines grouped under ``[section]`` headers (or
fully dotted keys such as ``system.B``).  Comments start with ``#``.
Every dimensioned value must carry a unit suffix, e.g.::

    experiment = cz
    seed = 7

    [system]
    B = 102.5 mT

    [grid]
    t_final = 200 ns
    points = 201

Ordinary-frequency units (Hz, kHz, MHz, GHz) are converted to angular
frequencies on ingestion; ``rad/s`` (and ``rad/s/T``, plain ``T``, ``s``)
are accepted unscaled, which is what the serializer emits so that a
serialized effective configuration re-parses to the identical object.

Unknown keys, missing units and malformed values are rejected with
line/column diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .params import (DriveParams, NoiseParams, Polarization, SystemParams,
                     TWO_PI)

EXPERIMENTS = ("cz", "electron_rotation", "nuclear_rotation",
               "characterize_hyperfine", "measure_nucleus", "resonances",
               "custom_circuit")


class ConfigError(ValueError):
    """Configuration parse/validation failure with source position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col}" if col else "") + ")"
        super().__init__(message + where)


@dataclass(frozen=True)
class GridSpec:
    t_final: float = 200e-9
    points: int = 201
    spacing: str = "linear"  # or "log"


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class ExperimentOptions:
    axis: str = "x"
    electron_state: int = +1
    target: str = "down"
    wait: float | None = None
    steps: str | None = None  # custom_circuit step program


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "cz"
    system: SystemParams = field(default_factory=SystemParams.defaults)
    drive: DriveParams = field(default_factory=DriveParams.off)
    noise: NoiseParams = field(default_factory=NoiseParams.defaults)
    grid: GridSpec = field(default_factory=GridSpec)
    options: ExperimentOptions = field(default_factory=ExperimentOptions)
    sweep: SweepSpec | None = None
    output: str | None = None
    seed: int = 0


# Unit suffix -> (multiplier, dimension).  Ordinary frequencies convert
# to angular; identity units (s, T, rad/s, ...) are the serializer's
# canonical choice because they round-trip exactly.
_UNITS = {
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9},
    "field": {"T": 1.0, "mT": 1e-3, "uT": 1e-6, "µT": 1e-6},
    "frequency": {"rad/s": 1.0, "Hz": TWO_PI, "kHz": TWO_PI * 1e3,
                  "MHz": TWO_PI * 1e6, "GHz": TWO_PI * 1e9},
    "gyromagnetic": {"rad/s/T": 1.0, "Hz/mT": TWO_PI / 1e-3,
                     "kHz/mT": TWO_PI * 1e3 / 1e-3,
                     "MHz/mT": TWO_PI * 1e6 / 1e-3},
    "rate": {"1/s": 1.0, "1/ms": 1e3, "1/us": 1e6},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
}

# key -> (kind, target).  kind in the unit dimensions above plus
# 'int' | 'float' | 'str' | 'choice:<a|b|..>'.
_SCHEMA = {
    "experiment": ("choice:" + "|".join(EXPERIMENTS), None),
    "seed": ("int", None),
    "output": ("str", None),
    "system.D": ("frequency", None),
    "system.E": ("frequency", None),
    "system.A_par": ("frequency", None),
    "system.A_perp": ("frequency", None),
    "system.B": ("field", None),
    "system.gamma_e": ("gyromagnetic", None),
    "system.gamma_n": ("gyromagnetic", None),
    "drive.omega0": ("frequency", None),
    "drive.omega": ("frequency", None),
    "drive.phi": ("angle", None),
    "drive.polarization": ("choice:unpolarized|circular_plus", None),
    "noise.gamma_e1": ("rate", None),
    "noise.gamma_n1": ("rate", None),
    "noise.gamma_n2": ("rate", None),
    "noise.nbar_e": ("float", None),
    "noise.nbar_n": ("float", None),
    "noise.lambda_e": ("frequency", None),
    "noise.ensemble_size": ("int", None),
    "grid.t_final": ("time", None),
    "grid.points": ("int", None),
    "grid.spacing": ("choice:linear|log", None),
    "options.axis": ("choice:x|y", None),
    "options.electron_state": ("int", None),
    "options.target": ("choice:up|down", None),
    "options.wait": ("time", None),
    "options.steps": ("str", None),
    "sweep.parameter": ("str", None),
    "sweep.values": ("list", None),
}

_SWEEPABLE = {k for k in _SCHEMA
              if k.split(".")[0] in ("system", "drive", "noise")}


def _parse_scalar(raw, kind, key, line, col):
    raw = raw.strip()
    if kind.startswith("choice:"):
        choices = kind.split(":", 1)[1].split("|")
        if raw not in choices:
            raise ConfigError(
                f"{key}: expected one of {', '.join(choices)}, got {raw!r}",
                line, col)
        return raw
    if kind == "str":
        if len(raw) >= 2 and raw[0] == '"' and raw[-1] == '"':
            raw = raw[1:-1]
        return raw
    if kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}",
                              line, col) from None
    if kind == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}",
                              line, col) from None
    # dimensioned value: "<number> <unit>"
    units = _UNITS[kind]
    parts = raw.split()
    if len(parts) != 2:
        raise ConfigError(
            f"{key}: expected '<number> <unit>' with a {kind} unit "
            f"({', '.join(units)}), got {raw!r}", line, col)
    num, unit = parts
    try:
        value = float(num)
    except ValueError:
        raise ConfigError(f"{key}: bad number {num!r}", line, col) from None
    if unit not in units:
        raise ConfigError(
            f"{key}: unknown {kind} unit {unit!r} "
            f"(expected one of {', '.join(units)})", line, col)
    return value * units[unit]


def _parse_value(raw, kind, key, line, col, element_kind=None):
    if kind != "list":
        return _parse_scalar(raw, kind, key, line, col)
    items = [s for s in (x.strip() for x in raw.split(",")) if s]
    if not items:
        raise ConfigError(f"{key}: empty value list", line, col)
    return tuple(_parse_scalar(s, element_kind, key, line, col)
                 for s in items)


def parse_config(text) -> ExperimentConfig:
    """Parse configuration text into a fully defaulted ExperimentConfig."""
    entries = {}
    positions = {}
    section = ""
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        body = stripped.strip()
        col = len(rawline) - len(rawline.lstrip()) + 1
        if body.startswith("[") and body.endswith("]"):
            section = body[1:-1].strip()
            if not section:
                raise ConfigError("empty section header", lineno, col)
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", lineno, col)
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        full = f"{section}.{key}" if section else key
        if full not in _SCHEMA:
            raise ConfigError(f"unknown key {full!r}", lineno, col)
        if not value:
            raise ConfigError(f"{full}: missing value", lineno, col)
        if full in entries:
            raise ConfigError(f"duplicate key {full!r}", lineno, col)
        entries[full] = value
        positions[full] = (lineno, col)
    return _build(entries, positions)


def _build(entries, positions) -> ExperimentConfig:
    parsed = {}
    for key, raw in entries.items():
        line, col = positions[key]
        kind = _SCHEMA[key][0]
        if key == "sweep.values":
            continue  # handled with the sweep parameter below
        parsed[key] = _parse_value(raw, kind, key, line, col)

    def section_overrides(defaults, prefix, fields):
        values = {}
        for name in fields:
            key = f"{prefix}.{name}"
            if key in parsed:
                values[name] = parsed[key]
        return replace(defaults, **values) if values else defaults

    system = section_overrides(
        SystemParams.defaults(), "system",
        ("D", "E", "A_par", "A_perp", "B", "gamma_e", "gamma_n"))
    drive = section_overrides(DriveParams.off(), "drive",
                              ("omega0", "omega", "phi"))
    if "drive.polarization" in parsed:
        drive = replace(drive,
                        polarization=Polarization(parsed["drive.polarization"]))
    noise = section_overrides(
        NoiseParams.defaults(), "noise",
        ("gamma_e1", "gamma_n1", "gamma_n2", "nbar_e", "nbar_n", "lambda_e",
         "ensemble_size"))
    grid = section_overrides(GridSpec(), "grid",
                             ("t_final", "points", "spacing"))
    options = section_overrides(ExperimentOptions(), "options",
                                ("axis", "electron_state", "target", "wait",
                                 "steps"))
    sweep = None
    if "sweep.parameter" in parsed or "sweep.values" in entries:
        if "sweep.parameter" not in parsed or "sweep.values" not in entries:
            missing = ("sweep.values" if "sweep.parameter" in parsed
                       else "sweep.parameter")
            any_key = next(k for k in entries if k.startswith("sweep."))
            raise ConfigError(f"sweep requires {missing}",
                              *positions[any_key])
        param = parsed["sweep.parameter"]
        if param not in _SWEEPABLE:
            raise ConfigError(
                f"sweep.parameter must name a system/drive/noise key, "
                f"got {param!r}", *positions["sweep.parameter"])
        line, col = positions["sweep.values"]
        values = _parse_value(entries["sweep.values"], "list",
                              "sweep.values", line, col,
                              element_kind=_SCHEMA[param][0])
        sweep = SweepSpec(parameter=param, values=values)

    cfg = ExperimentConfig(
        experiment=parsed.get("experiment", "cz"),
        system=system, drive=drive, noise=noise, grid=grid,
        options=options, sweep=sweep,
        output=parsed.get("output"), seed=parsed.get("seed", 0))
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    try:
        cfg.system.validate()
        cfg.drive.validate()
        cfg.noise.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.grid.points < 2:
        raise ConfigError("grid.points must be >= 2")
    if cfg.grid.t_final <= 0:
        raise ConfigError("grid.t_final must be > 0")
    if cfg.options.electron_state not in (+1, 0, -1):
        raise ConfigError("options.electron_state must be +1, 0 or -1")
    if cfg.experiment == "custom_circuit" and not cfg.options.steps:
        raise ConfigError("custom_circuit requires options.steps")
    return cfg


def _fmt(x):
    return repr(float(x))


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form of the effective configuration.  Uses identity
    units (rad/s, T, s) so parse(serialize(cfg)) == cfg exactly."""
    s, d, n, g, o = cfg.system, cfg.drive, cfg.noise, cfg.grid, cfg.options
    lines = [f"experiment = {cfg.experiment}", f"seed = {cfg.seed}"]
    if cfg.output is not None:
        lines.append(f'output = "{cfg.output}"')
    lines += ["", "[system]"]
    for name in ("D", "E", "A_par", "A_perp"):
        lines.append(f"{name} = {_fmt(getattr(s, name))} rad/s")
    lines.append(f"B = {_fmt(s.B)} T")
    lines.append(f"gamma_e = {_fmt(s.gamma_e)} rad/s/T")
    lines.append(f"gamma_n = {_fmt(s.gamma_n)} rad/s/T")
    lines += ["", "[drive]",
              f"omega0 = {_fmt(d.omega0)} rad/s",
              f"omega = {_fmt(d.omega)} rad/s",
              f"phi = {_fmt(d.phi)} rad",
              f"polarization = {d.polarization.value}"]
    lines += ["", "[noise]",
              f"gamma_e1 = {_fmt(n.gamma_e1)} 1/s",
              f"gamma_n1 = {_fmt(n.gamma_n1)} 1/s",
              f"gamma_n2 = {_fmt(n.gamma_n2)} 1/s",
              f"nbar_e = {_fmt(n.nbar_e)}",
              f"nbar_n = {_fmt(n.nbar_n)}",
              f"lambda_e = {_fmt(n.lambda_e)} rad/s",
              f"ensemble_size = {n.ensemble_size}"]
    lines += ["", "[grid]",
              f"t_final = {_fmt(g.t_final)} s",
              f"points = {g.points}",
              f"spacing = {g.spacing}"]
    lines += ["", "[options]",
              f"axis = {o.axis}",
              f"electron_state = {o.electron_state:+d}",
              f"target = {o.target}"]
    if o.wait is not None:
        lines.append(f"wait = {_fmt(o.wait)} s")
    if o.steps is not None:
        lines.append(f'steps = "{o.steps}"')
    if cfg.sweep is not None:
        kind = _SCHEMA[cfg.sweep.parameter][0]
        unit = {"frequency": " rad/s", "field": " T", "rate": " 1/s",
                "angle": " rad", "time": " s", "gyromagnetic": " rad/s/T",
                "float": ""}[kind]
        values = ", ".join(_fmt(v) + unit for v in cfg.sweep.values)
        lines += ["", "[sweep]",
                  f"parameter = {cfg.sweep.parameter}",
                  f"values = {values}"]
    return "\n".join(lines) + "\n"


def apply_sweep_value(cfg: ExperimentConfig, value) -> ExperimentConfig:
    """Config with one sweep value substituted and the sweep cleared."""
    section, name = cfg.sweep.parameter.split(".")
    target = replace(getattr(cfg, section), **{name: value})
    return replace(cfg, sweep=None, **{section: target})
