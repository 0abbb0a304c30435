"""Timing comparison of the compiled kernel against the Python fallback.

Runs a representative driven Schrodinger integration and a dissipative
Lindblad integration with each backend and reports wall-clock times.

Usage: python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from nvgatesim import algebra, backend, dynamics
from nvgatesim.params import (DriveParams, NoiseParams, Polarization,
                              SystemParams)


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="take the best of N runs (default 3)")
    args = parser.parse_args()

    p = SystemParams.defaults()
    drive = DriveParams(omega0=2 * np.pi * 100e6, omega=0.0, phi=0.0,
                        polarization=Polarization.CIRCULAR_PLUS)
    noise = NoiseParams(gamma_e1=5e4, gamma_n2=2e4,
                        lambda_e=0.0, ensemble_size=1)
    model = dynamics.HamiltonianModel.from_params(p, drive)
    psi0 = algebra.basis_state(0, True)
    rho0 = algebra.density_from_pure(psi0)

    cases = {
        "schrodinger 500 ns": lambda name: dynamics.evolve_schrodinger(
            model, psi0, 500e-9, snapshots=51, backend_name=name),
        "lindblad 500 ns": lambda name: dynamics.evolve_lindblad(
            model, noise, rho0, 500e-9, snapshots=51, backend_name=name),
    }

    backends = ["python"]
    try:
        backend.get_kernel("compiled")
        backends.append("compiled")
    except ValueError:
        print("compiled extension not built; timing python backend only")

    print(f"active default backend: {backend.backend_name()}")
    print(f"{'case':24s} " + " ".join(f"{b:>12s}" for b in backends)
          + ("      speedup" if len(backends) == 2 else ""))
    for label, run in cases.items():
        times = [_time(lambda: run(b), args.repeat) for b in backends]
        row = f"{label:24s} " + " ".join(f"{t * 1e3:9.1f} ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
