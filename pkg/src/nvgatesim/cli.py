"""Command-line front end.

Commands::

    nvgatesim run <config> [--output DIR] [--seed N] [--workers N]
    nvgatesim resonances [--b-field "50 mT"] [--output DIR]
    nvgatesim validate <config>

``run`` executes the configured experiment (or a parameter sweep) and
writes CSV data files plus a ``.meta.txt`` sidecar recording the full
effective configuration, library version and seed, so every data file is
reproducible from its sidecar alone.  Exit codes: 0 success, 2
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys

import numpy as np

from . import __version__, circuits, config as config_mod, gates, hamiltonian
from .config import (ConfigError, ExperimentConfig, apply_sweep_value,
                     parse_config, serialize_config)
from ._integrator import StepSizeUnderflow
from .params import NoiseParams, SystemParams

_NS = 1e9
_MT = 1e3

CSV_COLUMNS = {
    "cz": ("time_ns", "error_probability", "leakage"),
    "electron_rotation": ("time_ns", "error_probability",
                          "rotation_angle_rad", "leakage"),
    "nuclear_rotation": ("time_ns", "error_probability",
                         "rotation_angle_rad", "leakage"),
    "resonances": ("name", "center_mT", "fwhm_mT"),
    "characterize_hyperfine": ("sweep_value", "p_electron_zero"),
    "measure_nucleus": ("sweep_value", "p_electron_zero"),
    "custom_circuit": ("sweep_value", "p_electron_zero"),
}

SUMMARY_COLUMNS = ("sweep_value", "pi4_time_ns", "pi4_error",
                   "pi2_time_ns", "pi2_error")


def _num(x):
    """Deterministic CSV number formatting."""
    return f"{float(x):.12g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\r\n")
        for row in rows:
            fh.write(",".join(x if isinstance(x, str) else _num(x)
                              for x in row) + "\r\n")


def _write_sidecar(path, cfg: ExperimentConfig):
    with open(path, "w") as fh:
        fh.write(f"# nvgatesim {__version__}\n")
        fh.write(f"# seed = {cfg.seed}\n")
        fh.write(serialize_config(cfg))


def _grid(cfg: ExperimentConfig):
    g = cfg.grid
    if g.spacing == "log":
        return np.geomspace(g.t_final / g.points, g.t_final, g.points)
    return np.linspace(0.0, g.t_final, g.points)


def _series_rows(experiment, series):
    rows = []
    for r in series:
        if experiment == "cz":
            rows.append((r.duration * _NS, r.error_probability, r.leakage))
        else:
            rows.append((r.duration * _NS, r.error_probability,
                         r.rotation_angle, r.leakage))
    return rows


def resonance_rows(p: SystemParams):
    ex = hamiltonian.exchange_resonance(p)
    st = hamiltonian.strain_resonance(p)
    null = hamiltonian.nuclear_null_field(p)
    return [
        ("exchange_minus", ex.minus.center * _MT, ex.minus.fwhm * _MT),
        ("exchange_plus", ex.plus.center * _MT, ex.plus.fwhm * _MT),
        ("strain_up", st.up.center * _MT, st.up.fwhm * _MT),
        ("strain_down", st.down.center * _MT, st.down.fwhm * _MT),
        ("nuclear_null", null * _MT, 0.0),
    ]


def _simulate_series(cfg: ExperimentConfig):
    p, noise, d, o = cfg.system, cfg.noise, cfg.drive, cfg.options
    if cfg.experiment == "cz":
        return gates.simulate_cz(p, noise, t_final=cfg.grid.t_final,
                                 snapshots=cfg.grid.points, seed=cfg.seed)
    if cfg.experiment == "electron_rotation":
        return gates.simulate_electron_rotation(
            p, noise, d, o.axis, cfg.grid.t_final,
            snapshots=cfg.grid.points, seed=cfg.seed)
    return gates.simulate_nuclear_rotation(
        p, noise, d, o.electron_state, o.axis, cfg.grid.t_final,
        snapshots=cfg.grid.points, seed=cfg.seed)


def run_point(cfg: ExperimentConfig):
    """One experiment -> (rows, summary_row_tail or None)."""
    p, noise = cfg.system, cfg.noise
    if cfg.experiment == "resonances":
        return resonance_rows(p), None
    if cfg.experiment == "characterize_hyperfine":
        grid = _grid(cfg)
        drive = cfg.drive if cfg.drive.omega0 > 0.0 else None
        res = circuits.characterize_hyperfine(p, noise, grid, drive=drive,
                                              seed=cfg.seed)
        rows = [(w * _NS, prob)
                for w, prob in zip(res.waits, res.p_electron_zero)]
        return rows, None
    if cfg.experiment == "measure_nucleus":
        # Sweep the input basis-rotation angle over [0, pi]; the recorded
        # probability traces sin^2(angle).
        angles = np.linspace(0.0, math.pi, cfg.grid.points)
        basis_drive = (cfg.drive if cfg.drive.omega0 > 0.0
                       else circuits._default_nuclear_drive())
        rows = []
        for angle in angles:
            rot = None
            if angle > 0.0:
                rot = circuits.NuclearPulse("x", 2.0 * float(angle),
                                            basis_drive)
            res = circuits.measure_nucleus_z(p, noise, basis_rotation=rot,
                                             wait=cfg.options.wait,
                                             seed=cfg.seed)
            rows.append((float(angle), res.p_electron_zero))
        return rows, None
    if cfg.experiment == "custom_circuit":
        steps = parse_circuit_steps(cfg.options.steps, cfg.drive)
        res = circuits.run_circuit(steps, p, noise, seed=cfg.seed)
        prob = res.p_electron_zero if res.p_electron_zero is not None else ""
        return [(0.0, prob)], None
    series = _simulate_series(cfg)
    rows = _series_rows(cfg.experiment, series)
    return rows, _crossing_summary(series)


def _crossing_summary(series):
    """Interpolated error at the rotation-angle pi/4 and pi/2 crossings."""
    times = series.times
    angles = np.array([r.rotation_angle for r in series])
    errors = series.errors
    out = []
    for target in (math.pi / 4.0, math.pi / 2.0):
        if angles[-1] < target:
            out += [float("nan"), float("nan")]
            continue
        t_cross = float(np.interp(target, angles, times))
        e_cross = float(np.interp(t_cross, times, errors))
        out += [t_cross * _NS, e_cross]
    return tuple(out)


def parse_circuit_steps(program, drive):
    """Compact step language for custom circuits: steps separated by ';',
    e.g. ``prepare_electron 0; electron_pulse x 90 deg; wait 165 ns;
    nuclear_pulse x 180 deg; measure``."""
    steps = []
    for chunk in program.split(";"):
        tokens = chunk.split()
        if not tokens:
            continue
        op, args = tokens[0], tokens[1:]
        try:
            if op == "prepare_electron":
                steps.append(circuits.PrepareElectron(int(args[0])))
            elif op == "prepare_nucleus":
                steps.append(circuits.PrepareNucleus(args[0]))
            elif op == "wait":
                steps.append(circuits.Wait(_duration(args)))
            elif op == "electron_pulse":
                steps.append(circuits.ElectronPulse(args[0],
                                                    _angle(args[1:]), drive))
            elif op == "nuclear_pulse":
                steps.append(circuits.NuclearPulse(args[0],
                                                   _angle(args[1:]), drive))
            elif op == "measure":
                steps.append(circuits.MeasureElectronZ(project=False))
            else:
                raise ConfigError(f"unknown circuit step {op!r}")
        except (IndexError, ValueError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad circuit step {chunk.strip()!r}: {exc}") \
                from None
    return steps


def _duration(args):
    scale = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}
    if len(args) != 2 or args[1] not in scale:
        raise ConfigError(f"expected '<number> <time unit>', got {args!r}")
    return float(args[0]) * scale[args[1]]


def _angle(args):
    scale = {"rad": 1.0, "deg": math.pi / 180.0}
    if len(args) != 2 or args[1] not in scale:
        raise ConfigError(f"expected '<number> rad|deg', got {args!r}")
    return float(args[0]) * scale[args[1]]


def _sweep_worker(cfg_text, value):
    cfg = parse_config(cfg_text)
    return run_point(apply_sweep_value(cfg, value))


def run_experiment(cfg: ExperimentConfig, output_dir=".", workers=1) -> list:
    """Execute cfg, write CSV (+ sidecar), return the written paths."""
    os.makedirs(output_dir, exist_ok=True)
    stem = os.path.join(output_dir, cfg.experiment)
    header = CSV_COLUMNS[cfg.experiment]
    written = []
    if cfg.sweep is None:
        rows, _ = run_point(cfg)
        _write_csv(stem + ".csv", header, rows)
        written.append(stem + ".csv")
    else:
        values = cfg.sweep.values
        if workers > 1:
            text = serialize_config(cfg)
            with concurrent.futures.ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_sweep_worker, [text] * len(values),
                                        values))
        else:
            results = [run_point(apply_sweep_value(cfg, v)) for v in values]
        all_rows = []
        summaries = []
        for value, (rows, summary) in zip(values, results):
            all_rows += [(value,) + tuple(row) for row in rows]
            if summary is not None:
                summaries.append((value,) + summary)
        _write_csv(stem + ".csv", ("sweep_value",) + header, all_rows)
        written.append(stem + ".csv")
        if summaries:
            _write_csv(stem + "_summary.csv", SUMMARY_COLUMNS, summaries)
            written.append(stem + "_summary.csv")
    _write_sidecar(stem + ".meta.txt", cfg)
    written.append(stem + ".meta.txt")
    return written


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nvgatesim",
        description="NV-center gate dynamics simulator")
    parser.add_argument("--version", action="version",
                        version=f"nvgatesim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("config_file")
    p_run.add_argument("--output", default=".", metavar="DIR")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=1)

    p_res = sub.add_parser("resonances", help="print resonance table")
    p_res.add_argument("--b-field", default=None, metavar="FIELD",
                       help='e.g. "50 mT"')
    p_res.add_argument("--output", default=None, metavar="DIR")

    p_val = sub.add_parser("validate", help="check a configuration file")
    p_val.add_argument("config_file")
    return parser


def _load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = _load_config(args.config_file)
            print(f"OK: {cfg.experiment} experiment, seed {cfg.seed}")
            return 0
        if args.command == "resonances":
            p = SystemParams.defaults()
            if args.b_field is not None:
                b = config_mod._parse_scalar(args.b_field, "field",
                                             "--b-field", None, None)
                p = p.with_field(b)
            rows = resonance_rows(p)
            header = CSV_COLUMNS["resonances"]
            if args.output:
                os.makedirs(args.output, exist_ok=True)
                path = os.path.join(args.output, "resonances.csv")
                _write_csv(path, header, rows)
                print(path)
            else:
                print(",".join(header))
                for row in rows:
                    print(",".join(x if isinstance(x, str) else _num(x)
                                   for x in row))
            return 0
        cfg = _load_config(args.config_file)
        if args.seed is not None:
            from dataclasses import replace
            cfg = replace(cfg, seed=args.seed)
        for path in run_experiment(cfg, output_dir=args.output,
                                   workers=args.workers):
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (StepSizeUnderflow, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
