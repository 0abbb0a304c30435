"""Time evolution engines.

Three entry points: unitary Schrodinger propagation, Lindblad master
equation integration, and ensemble averaging over quasi-static Gaussian
dephasing noise on the electron.  All of them run the adaptive 5(4)
kernel on the linear system y' = (L0 + cos(omega*t + phi) * L1) y, where
y is either the state vector or the column-stacked density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import algebra, backend, hamiltonian
from .algebra import DIM
from .params import DriveParams, NoiseParams, SystemParams

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12

TRACE_TOL = 1e-8
SNAPSHOT_HERMITIAN_TOL = 1e-9
POSITIVITY_TOL = 1e-8

_SZ6 = hamiltonian.SZ6
_S = algebra.spin1_operators()
_I = algebra.spin_half_operators()
_SM6 = algebra.kron(_S["Sm"], np.eye(2))
_SP6 = algebra.kron(_S["Sp"], np.eye(2))
_NM6 = algebra.kron(np.eye(3), _I["Im"])
_NP6 = algebra.kron(np.eye(3), _I["Ip"])
_NZ6 = algebra.kron(np.eye(3), 2.0 * _I["Iz"])  # nuclear Pauli z


@dataclass(frozen=True)
class HamiltonianModel:
    """H(t) = h_static + cos(omega*t + phi) * h_drive (angular units)."""

    h_static: np.ndarray
    h_drive: np.ndarray | None = None
    omega: float = 0.0
    phi: float = 0.0

    @classmethod
    def from_params(cls, p: SystemParams, d: DriveParams | None = None):
        h_static = hamiltonian.static_hamiltonian(p)
        if d is None or d.omega0 == 0.0:
            return cls(h_static=h_static)
        return cls(h_static=h_static,
                   h_drive=d.omega0 * hamiltonian.drive_operator(p, d),
                   omega=d.omega, phi=d.phi)

    def at(self, t: float) -> np.ndarray:
        h = self.h_static
        if self.h_drive is not None:
            h = h + np.cos(self.omega * t + self.phi) * self.h_drive
        return h

    def with_extra_static(self, term: np.ndarray) -> "HamiltonianModel":
        return replace(self, h_static=self.h_static + term)


@dataclass
class EvolutionResult:
    """Trajectory snapshots on a monotone time grid."""

    times: np.ndarray
    states: list
    step_count: int
    max_trace_error: float

    @property
    def final_state(self):
        return self.states[-1]

    def expectation(self, op):
        """Tr(op rho) (or <psi|op|psi>) per snapshot."""
        op = np.asarray(op, dtype=complex)
        vals = []
        for s in self.states:
            if s.ndim == 1:
                vals.append(np.real(s.conj() @ op @ s))
            else:
                vals.append(np.real(np.trace(op @ s)))
        return np.array(vals)


def _snapshot_grid(t_final, snapshots):
    if snapshots is None:
        snapshots = 101
    if np.isscalar(snapshots):
        return np.linspace(0.0, float(t_final), int(snapshots))
    grid = np.asarray(snapshots, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) < 0):
        raise ValueError("snapshot grid must be a monotone 1-d array")
    if grid[0] < 0.0:
        raise ValueError("snapshot times must be >= 0")
    return grid


def _kernel_grid(grid):
    """Integration always starts at t = 0; prepend it when the snapshot
    grid does not include it, so the initial state is anchored correctly."""
    if grid[0] == 0.0:
        return grid, 0
    return np.concatenate(([0.0], grid)), 1


def evolve_schrodinger(model: HamiltonianModel, psi0, t_final,
                       snapshots=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                       backend_name=None) -> EvolutionResult:
    """Integrate i d/dt psi = H(t) psi from a normalized initial state."""
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")
    grid = _snapshot_grid(t_final, snapshots)
    run_grid, skip = _kernel_grid(grid)
    a_mat = -1j * model.h_static
    b_mat = None if model.h_drive is None else -1j * model.h_drive
    kern = backend.get_kernel(backend_name)
    ys, stats = kern(a_mat, b_mat, model.omega, model.phi, psi0, run_grid,
                     rtol=rtol, atol=atol)
    ys = ys[skip:]
    drift = float(np.max(np.abs(np.linalg.norm(ys, axis=1) - 1.0)))
    states = [y / np.linalg.norm(y) for y in ys]
    return EvolutionResult(times=grid, states=states,
                           step_count=stats.steps_accepted,
                           max_trace_error=drift)


# --- Lindblad superoperators -------------------------------------------------

def _vec(rho):
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def _unvec(v):
    return v.reshape(DIM, DIM, order="F")


def commutator_superoperator(h):
    """Column-stacked superoperator of -i[h, .]."""
    idm = np.eye(h.shape[0])
    return -1j * (np.kron(idm, h) - np.kron(h.T, idm))


def _lindblad_term(op, rate):
    """rate * (L rho L^dag - (1/2){L^dag L, rho}) as a superoperator."""
    idm = np.eye(op.shape[0])
    ldl = op.conj().T @ op
    return rate * (np.kron(op.conj(), op)
                   - 0.5 * np.kron(idm, ldl)
                   - 0.5 * np.kron(ldl.T, idm))


def dissipator_superoperator(noise: NoiseParams):
    """All five dissipator lines of the master equation: nuclear sigma_z
    dephasing, electron S-/S+ emission/absorption, nuclear sigma-/sigma+
    emission/absorption."""
    d = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    if noise.gamma_n2:
        # Gamma_n2 (sigma_z rho sigma_z - rho), written without the 1/2.
        d += noise.gamma_n2 * (np.kron(_NZ6.T, _NZ6) - np.eye(DIM * DIM))
    if noise.gamma_e1:
        d += _lindblad_term(_SM6, noise.gamma_e1 * (noise.nbar_e + 1.0))
        if noise.nbar_e:
            d += _lindblad_term(_SP6, noise.gamma_e1 * noise.nbar_e)
    if noise.gamma_n1:
        d += _lindblad_term(_NM6, noise.gamma_n1 * (noise.nbar_n + 1.0))
        if noise.nbar_n:
            d += _lindblad_term(_NP6, noise.gamma_n1 * noise.nbar_n)
    return d


def liouvillian(model: HamiltonianModel, noise: NoiseParams):
    """(L0, L1) with d vec(rho)/dt = (L0 + cos(omega t + phi) L1) vec(rho)."""
    l0 = commutator_superoperator(model.h_static) + dissipator_superoperator(noise)
    l1 = None if model.h_drive is None else commutator_superoperator(model.h_drive)
    return l0, l1


def _check_density(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = algebra.density_from_pure(rho / np.linalg.norm(rho))
    if rho.shape != (DIM, DIM):
        raise ValueError(f"density matrix must be {DIM}x{DIM}")
    if abs(np.trace(rho) - 1.0) > 1e-9 or not algebra.is_hermitian(rho, 1e-9):
        raise ValueError("invalid density matrix (trace/hermiticity)")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-9:
        raise ValueError("invalid density matrix (negative eigenvalue)")
    return rho


def evolve_lindblad(model: HamiltonianModel, noise: NoiseParams, rho0,
                    t_final, snapshots=None, rtol=DEFAULT_RTOL,
                    atol=DEFAULT_ATOL, backend_name=None) -> EvolutionResult:
    """Integrate the master equation; accepts a pure state or a density
    matrix as the initial condition, always returns density snapshots."""
    rho0 = _check_density(rho0)
    grid = _snapshot_grid(t_final, snapshots)
    run_grid, skip = _kernel_grid(grid)
    l0, l1 = liouvillian(model, noise)
    kern = backend.get_kernel(backend_name)
    ys, stats = kern(l0, l1, model.omega, model.phi, _vec(rho0), run_grid,
                     rtol=rtol, atol=atol)
    ys = ys[skip:]
    states = [_unvec(y) for y in ys]
    trace_err = float(max(abs(np.trace(s) - 1.0) for s in states))
    return EvolutionResult(times=grid, states=states,
                           step_count=stats.steps_accepted,
                           max_trace_error=trace_err)


def evolve_with_quasistatic_noise(model: HamiltonianModel, noise: NoiseParams,
                                  rho0, t_final, snapshots=None, seed=0,
                                  rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                                  backend_name=None) -> EvolutionResult:
    """Ensemble-average of Lindblad runs with a static electron detuning
    lambda_e * f_k * Sz per trajectory, f_k standard normal (seeded)."""
    noise.validate()
    if noise.lambda_e == 0.0 or noise.ensemble_size == 1:
        return evolve_lindblad(model, noise, rho0, t_final, snapshots,
                               rtol=rtol, atol=atol, backend_name=backend_name)
    rng = np.random.default_rng(seed)
    offsets = rng.standard_normal(noise.ensemble_size)
    acc = None
    steps = 0
    trace_err = 0.0
    grid = _snapshot_grid(t_final, snapshots)
    for f_k in offsets:
        member = model.with_extra_static(noise.lambda_e * f_k * _SZ6)
        res = evolve_lindblad(member, noise, rho0, t_final, grid,
                              rtol=rtol, atol=atol, backend_name=backend_name)
        stack = np.array(res.states)
        acc = stack if acc is None else acc + stack
        steps += res.step_count
        trace_err = max(trace_err, res.max_trace_error)
    acc /= noise.ensemble_size
    return EvolutionResult(times=grid, states=list(acc), step_count=steps,
                           max_trace_error=trace_err)


def propagate_static(model: HamiltonianModel, noise: NoiseParams, rho0, dt):
    """Exact drive-off propagation over dt via the superoperator
    exponential; used for circuit wait segments."""
    if model.h_drive is not None:
        raise ValueError("propagate_static requires a drive-off model")
    rho0 = _check_density(rho0)
    import scipy.linalg
    l0 = (commutator_superoperator(model.h_static)
          + dissipator_superoperator(noise))
    prop = scipy.linalg.expm(l0 * dt)
    return _unvec(prop @ _vec(rho0))


def check_snapshot_invariants(result: EvolutionResult):
    """CPTP sanity on density snapshots: trace, hermiticity, positivity.
    Returns the worst (trace_err, herm_err, min_eig) triple."""
    worst = (0.0, 0.0, np.inf)
    for s in result.states:
        if s.ndim != 2:
            continue
        tr = abs(np.trace(s) - 1.0)
        he = float(np.max(np.abs(s - s.conj().T)))
        ev = float(np.min(np.linalg.eigvalsh((s + s.conj().T) / 2.0)))
        worst = (max(worst[0], tr), max(worst[1], he), min(worst[2], ev))
    return worst
