"""Pulse-level gate simulator for a single 15NV- center.

The package models a spin-1 electron hyperfine-coupled to a spin-1/2
nitrogen nucleus (6 levels) and integrates the driven, dissipative master
equation to reproduce entangling-gate, electron-rotation and
nuclear-rotation dynamics, with analytic resonance calculators,
characterization circuits and a CSV-emitting command line.
"""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("nvgatesim")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .params import (DriveParams, NoiseParams, Polarization, SystemParams,
                     cycles)
from . import algebra, backend, circuits, dynamics, gates, hamiltonian
from .config import (ConfigError, ExperimentConfig, GridSpec, SweepSpec,
                     parse_config, serialize_config)
from .dynamics import (EvolutionResult, HamiltonianModel, evolve_lindblad,
                       evolve_schrodinger, evolve_with_quasistatic_noise,
                       propagate_static)
from .gates import (GateResult, GateSeries, cz_gate_time, error_probability,
                    leakage, simulate_cz, simulate_electron_rotation,
                    simulate_nuclear_rotation)
from .circuits import (CircuitResult, characterize_hyperfine,
                       initialize_nucleus, measure_nucleus_z, run_circuit)

__all__ = [
    "__version__",
    "DriveParams", "NoiseParams", "Polarization", "SystemParams", "cycles",
    "algebra", "backend", "circuits", "dynamics", "gates", "hamiltonian",
    "ConfigError", "ExperimentConfig", "GridSpec", "SweepSpec",
    "parse_config", "serialize_config",
    "EvolutionResult", "HamiltonianModel", "evolve_lindblad",
    "evolve_schrodinger", "evolve_with_quasistatic_noise",
    "propagate_static",
    "GateResult", "GateSeries", "cz_gate_time", "error_probability",
    "leakage", "simulate_cz", "simulate_electron_rotation",
    "simulate_nuclear_rotation",
    "CircuitResult", "characterize_hyperfine", "initialize_nucleus",
    "measure_nucleus_z", "run_circuit",
]
