"""Pulse-sequence composition and characterization circuits.

A circuit is a list of steps (preparations, driven pulses, free-evolution
waits, and an electron z-measurement) executed sequentially against the
full 6-level model with density matrices, so mixed states, dissipation and
measurement statistics are handled uniformly.

Pulse angles follow the rotation convention R(theta) = cos(theta/2) 1 +
i sin(theta/2) sigma: a theta = pi/2 pulse takes a basis state to an equal
superposition and theta = pi inverts.  Pulse durations are derived from
the nominal Rabi-rate formulas in the gates module unless an explicit
duration override is given.

Successive pulses stay phase-coherent: each drive segment's phase is
offset by omega * t_start so the carrier behaves as one continuous local
oscillator across the whole sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from . import algebra, dynamics, gates, hamiltonian
from .algebra import DIM, basis_state, composite_index, density_from_pure
from .params import DriveParams, NoiseParams, Polarization, SystemParams, cycles

_ELECTRON_ZERO_INDICES = (composite_index(0, True), composite_index(0, False))


# --- circuit steps -----------------------------------------------------------

@dataclass(frozen=True)
class ElectronPulse:
    axis: str
    angle: float
    drive: DriveParams
    duration: float | None = None


@dataclass(frozen=True)
class NuclearPulse:
    axis: str
    angle: float
    drive: DriveParams
    electron_state: int = +1
    duration: float | None = None


@dataclass(frozen=True)
class Wait:
    duration: float


@dataclass(frozen=True)
class MeasureElectronZ:
    """Born probability of the electron |0> block.

    keep = 'both' applies the non-selective (dephasing) update; 'zero' or
    'one' post-selects that outcome and renormalizes.  project = False
    records the probability without disturbing the state.  confusion is a
    classical readout error: the recorded probability becomes
    p (1 - c) + (1 - p) c, leaving the quantum update untouched.
    """

    project: bool = True
    keep: str = "both"
    confusion: float = 0.0


@dataclass(frozen=True)
class PrepareElectron:
    state: int  # m_s level: +1, 0 or -1


@dataclass(frozen=True)
class PrepareNucleus:
    state: str  # 'up' or 'down'


@dataclass
class CircuitResult:
    p_electron_zero: float | None
    final_state: np.ndarray
    timeline: list


def _validate_step(step):
    if isinstance(step, (ElectronPulse, NuclearPulse)):
        if not -2.0 * math.pi < step.angle <= 2.0 * math.pi:
            raise ValueError("pulse angle must lie in (-2*pi, 2*pi]")
        if step.axis not in ("x", "y"):
            raise ValueError("pulse axis must be 'x' or 'y'")
        if step.duration is not None and step.duration < 0:
            raise ValueError("pulse duration must be >= 0")
    elif isinstance(step, Wait):
        if step.duration < 0:
            raise ValueError("wait duration must be >= 0")
    elif isinstance(step, MeasureElectronZ):
        if step.keep not in ("both", "zero", "one"):
            raise ValueError("keep must be 'both', 'zero' or 'one'")
        if not 0.0 <= step.confusion <= 1.0:
            raise ValueError("confusion must lie in [0, 1]")
    elif isinstance(step, PrepareElectron):
        if step.state not in (+1, 0, -1):
            raise ValueError("electron level must be +1, 0 or -1")
    elif isinstance(step, PrepareNucleus):
        if step.state not in ("up", "down"):
            raise ValueError("nuclear state must be 'up' or 'down'")
    else:
        raise TypeError(f"unknown circuit step {step!r}")


def electron_zero_probability(rho) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(sum(rho[i, i] for i in _ELECTRON_ZERO_INDICES)))


def _electron_projectors():
    p0 = np.zeros((DIM, DIM))
    for i in _ELECTRON_ZERO_INDICES:
        p0[i, i] = 1.0
    return p0, np.eye(DIM) - p0


def _prepare_electron(rho, state):
    marginal = algebra.partial_trace_electron(rho)
    e = np.zeros((3, 3), dtype=complex)
    e[algebra.ELECTRON_INDEX[state], algebra.ELECTRON_INDEX[state]] = 1.0
    return algebra.kron(e, marginal)


def _prepare_nucleus(rho, state):
    marginal = algebra.partial_trace_nucleus(rho)
    n = np.zeros((2, 2), dtype=complex)
    idx = algebra.NUCLEUS_UP if state == "up" else algebra.NUCLEUS_DOWN
    n[idx, idx] = 1.0
    return algebra.kron(marginal, n)


# --- execution ---------------------------------------------------------------

def _pulse_drive_and_duration(p, step):
    """Resolve the concrete drive (resonant frequency, axis phase) and the
    pulse duration for an electron or nuclear pulse."""
    if isinstance(step, ElectronPulse):
        omega = step.drive.omega
        if omega == 0.0:
            omega = gates.electron_resonance_frequency(p)
        phi = gates._ELECTRON_PHASE[step.axis]
        d = replace(step.drive, omega=omega, phi=phi)
        duration = step.duration
        if duration is None:
            duration = gates.electron_rotation_time(d, step.angle / 2.0)
        return d, duration
    omega = step.drive.omega
    if omega == 0.0:
        omega = hamiltonian.nuclear_transition_frequency(p, step.electron_state)
    phi = gates._NUCLEAR_PHASE[step.axis]
    d = replace(step.drive, omega=omega, phi=phi)
    duration = step.duration
    if duration is None:
        duration = gates.nuclear_rotation_time(p, d, step.electron_state,
                                               step.angle / 2.0)
    return d, duration


def _run_once(steps, p, noise, rho0, rtol, atol):
    """Single deterministic pass (no quasi-static ensemble)."""
    rho = dynamics._check_density(rho0)
    t_abs = 0.0
    p_zero = None
    timeline = []
    proj0, proj1 = _electron_projectors()
    for step in steps:
        _validate_step(step)
        if isinstance(step, PrepareElectron):
            rho = _prepare_electron(rho, step.state)
            timeline.append((t_abs, f"prepare electron |{step.state:+d}>"))
        elif isinstance(step, PrepareNucleus):
            rho = _prepare_nucleus(rho, step.state)
            timeline.append((t_abs, f"prepare nucleus {step.state}"))
        elif isinstance(step, Wait):
            if step.duration > 0.0:
                model = dynamics.HamiltonianModel.from_params(p, None)
                rho = dynamics.propagate_static(model, noise, rho,
                                                step.duration)
            timeline.append((t_abs, f"wait {step.duration * 1e9:.3f} ns"))
            t_abs += step.duration
        elif isinstance(step, (ElectronPulse, NuclearPulse)):
            d, duration = _pulse_drive_and_duration(p, step)
            # Keep the carrier phase-continuous across the sequence.
            d = replace(d, phi=d.phi + d.omega * t_abs)
            if duration > 0.0:
                model = dynamics.HamiltonianModel.from_params(p, d)
                res = dynamics.evolve_lindblad(model, noise, rho, duration,
                                               snapshots=2, rtol=rtol,
                                               atol=atol)
                rho = res.final_state
            kind = "electron" if isinstance(step, ElectronPulse) else "nuclear"
            timeline.append(
                (t_abs, f"{kind} {step.axis} pulse, angle {step.angle:.4f}"))
            t_abs += duration
        elif isinstance(step, MeasureElectronZ):
            born = electron_zero_probability(rho)
            p_zero = born * (1.0 - step.confusion) \
                + (1.0 - born) * step.confusion
            if step.project:
                r0 = proj0 @ rho @ proj0
                r1 = proj1 @ rho @ proj1
                if step.keep == "both":
                    rho = r0 + r1
                elif step.keep == "zero":
                    if born <= 0.0:
                        raise ValueError("cannot post-select a zero-"
                                         "probability outcome")
                    rho = r0 / born
                else:
                    if born >= 1.0:
                        raise ValueError("cannot post-select a zero-"
                                         "probability outcome")
                    rho = r1 / (1.0 - born)
            timeline.append((t_abs, f"measure electron z: P(|0>) = {p_zero:.6f}"))
    return CircuitResult(p_electron_zero=p_zero, final_state=rho,
                         timeline=timeline)


def run_circuit(steps, p: SystemParams, noise: NoiseParams, rho0=None,
                seed=0, rtol=dynamics.DEFAULT_RTOL,
                atol=dynamics.DEFAULT_ATOL) -> CircuitResult:
    """Execute a pulse sequence from rho0 (default: ground state |0, down>).

    With quasi-static electron dephasing enabled (noise.lambda_e > 0) the
    whole sequence is averaged over an ensemble of static Sz detunings, so
    measurement probabilities are ensemble means.
    """
    if rho0 is None:
        rho0 = density_from_pure(basis_state(0, nucleus_up=False))
    if noise.lambda_e == 0.0 or noise.ensemble_size == 1:
        return _run_once(steps, p, noise, rho0, rtol, atol)
    rng = np.random.default_rng(seed)
    offsets = rng.standard_normal(noise.ensemble_size)
    acc_state = None
    acc_p = 0.0
    have_p = False
    timeline = None
    for f_k in offsets:
        member = _run_once(steps, _with_sz_shift(p, noise.lambda_e * f_k),
                           noise, rho0, rtol, atol)
        acc_state = (member.final_state if acc_state is None
                     else acc_state + member.final_state)
        if member.p_electron_zero is not None:
            acc_p += member.p_electron_zero
            have_p = True
        if timeline is None:
            timeline = member.timeline
    n = noise.ensemble_size
    return CircuitResult(
        p_electron_zero=acc_p / n if have_p else None,
        final_state=acc_state / n,
        timeline=timeline)


def _with_sz_shift(p: SystemParams, shift: float) -> SystemParams:
    """System with an extra quasi-static detuning shift * Sz, folded into
    the electron Zeeman term as an equivalent field offset."""
    if p.gamma_e == 0.0:
        raise ZeroDivisionError("gamma_e must be nonzero")
    return replace(p, B=p.B + shift / p.gamma_e)


# --- characterization circuits (Fig. 7) --------------------------------------

def _default_electron_drive():
    return DriveParams(omega0=cycles(250e6), omega=0.0,
                       polarization=Polarization.CIRCULAR_PLUS)


def _default_nuclear_drive():
    return DriveParams(omega0=cycles(140e6), omega=0.0)


def electron_carrier_midpoint(p: SystemParams) -> float:
    """Electron drive frequency parked midway between the two nuclear-
    hyperfine |0> <-> |+1> lines, so level shifts common to both nuclear
    states drop out of a Ramsey fringe rate."""
    f_down = hamiltonian.exact_transition_frequency(p, (+1, False), (0, False))
    f_up = hamiltonian.exact_transition_frequency(p, (+1, True), (0, True))
    return 0.5 * (f_down + f_up)


@dataclass
class HyperfineCharacterization:
    waits: np.ndarray
    p_electron_zero: np.ndarray
    fitted_a_par: float
    fit_frequency: float
    fit_params: dict


def characterize_hyperfine(p: SystemParams, noise: NoiseParams, wait_grid,
                           drive: DriveParams | None = None, seed=0,
                           rtol=dynamics.DEFAULT_RTOL,
                           atol=dynamics.DEFAULT_ATOL) -> HyperfineCharacterization:
    """Ramsey-style sandwich (electron pi/2 x, wait, pi/2 y) versus wait
    time with the nucleus polarized down.

    The conditional hyperfine phase accrues at A_par/2 (the |+1, down>
    level is offset by -A_par/2), so the fitted oscillation frequency of
    the P(|0>) fringe recovers A_par as twice the fitted angular rate.
    The carrier sits at the hyperfine-line midpoint unless the drive
    specifies a frequency, cancelling nucleus-independent level shifts.
    """
    drive = _default_electron_drive() if drive is None else drive
    if drive.omega == 0.0:
        drive = replace(drive, omega=electron_carrier_midpoint(p))
    waits = np.asarray(wait_grid, dtype=float)
    probs = np.empty_like(waits)
    for i, w in enumerate(waits):
        steps = [
            PrepareNucleus("down"),
            PrepareElectron(0),
            ElectronPulse("x", math.pi / 2.0, drive),
            Wait(float(w)),
            ElectronPulse("y", math.pi / 2.0, drive),
            MeasureElectronZ(project=False),
        ]
        probs[i] = run_circuit(steps, p, noise, seed=seed, rtol=rtol,
                               atol=atol).p_electron_zero

    def fringe(t, amp, omega, phase, offset):
        return offset + amp * np.cos(omega * t + phase)

    # FFT seed for the oscillation frequency, then a least-squares polish.
    dt = waits[1] - waits[0]
    spectrum = np.fft.rfft(probs - probs.mean())
    freqs = 2.0 * math.pi * np.fft.rfftfreq(len(waits), dt)
    guess_omega = freqs[int(np.argmax(np.abs(spectrum[1:]))) + 1]
    popt, _ = scipy.optimize.curve_fit(
        fringe, waits, probs,
        p0=[0.5 * np.ptp(probs), guess_omega, 0.0, probs.mean()])
    omega_fit = abs(float(popt[1]))
    return HyperfineCharacterization(
        waits=waits, p_electron_zero=probs,
        fitted_a_par=2.0 * omega_fit, fit_frequency=omega_fit,
        fit_params={"amplitude": float(popt[0]), "phase": float(popt[2]),
                    "offset": float(popt[3])})


def measure_nucleus_z(p: SystemParams, noise: NoiseParams,
                      basis_rotation: NuclearPulse | None = None,
                      wait: float | None = None,
                      drive: DriveParams | None = None, rho0=None,
                      keep: str = "both", seed=0,
                      rtol=dynamics.DEFAULT_RTOL,
                      atol=dynamics.DEFAULT_ATOL) -> CircuitResult:
    """Map the nuclear z-projection onto the electron |0> probability.

    Electron Ramsey sandwich with the wait fixed at the controlled-phase
    time (default pi/A_par), so the two nuclear states produce opposite
    conditional phases; nucleus down maps to P(|0>) ~ 0 and nucleus up to
    P(|0>) ~ 1.  An optional preceding nuclear rotation (applied with the
    electron parked in |+1>, where the hyperfine-enhanced splitting makes
    the drive practical) selects the measurement basis.
    """
    drive = _default_electron_drive() if drive is None else drive
    wait = gates.cz_gate_time(p) if wait is None else wait
    steps = []
    if basis_rotation is not None:
        steps += [PrepareElectron(+1), basis_rotation]
    steps += [
        PrepareElectron(0),
        ElectronPulse("x", math.pi / 2.0, drive),
        Wait(wait),
        # A 3pi/2 closing pulse flips the fringe sign so nucleus down maps
        # to P(|0>) ~ 0 and nucleus up to ~ 1.
        ElectronPulse("y", 3.0 * math.pi / 2.0, drive),
        MeasureElectronZ(project=True, keep=keep),
    ]
    return run_circuit(steps, p, noise, rho0=rho0, seed=seed, rtol=rtol,
                       atol=atol)


def initialize_nucleus(p: SystemParams, noise: NoiseParams,
                       target: str = "down", rho0=None,
                       nuclear_drive: DriveParams | None = None, seed=0,
                       rtol=dynamics.DEFAULT_RTOL,
                       atol=dynamics.DEFAULT_ATOL) -> CircuitResult:
    """Measurement-based nuclear preparation with classical feed-forward.

    Runs the z-measurement circuit, post-selects each outcome branch,
    resets the electron to |+1>, flips the nucleus (pi pulse) on the
    branch that projected onto the wrong state, and recombines the two
    branches with their Born weights.
    """
    if target not in ("up", "down"):
        raise ValueError("target must be 'up' or 'down'")
    if rho0 is None:
        mixed = algebra.kron(np.diag([0.0, 1.0, 0.0]).astype(complex),
                             np.eye(2, dtype=complex) / 2.0)
        rho0 = mixed
    if nuclear_drive is None:
        nuclear_drive = DriveParams(omega0=cycles(140e6), omega=0.0)
    measured = measure_nucleus_z(p, noise, rho0=rho0, keep="both", seed=seed,
                                 rtol=rtol, atol=atol)
    p_zero = measured.p_electron_zero
    timeline = list(measured.timeline)
    proj0, proj1 = _electron_projectors()
    rho = measured.final_state
    branches = []
    # Electron outcome |0> heralds nucleus up and |1> heralds nucleus down
    # (the measurement circuit maps down -> P(|0>) ~ 0).
    for outcome, proj, weight, nucleus in (
            ("zero", proj0, p_zero, "up"), ("one", proj1, 1.0 - p_zero, "down")):
        if weight <= 1e-12:
            continue
        branch = proj @ rho @ proj / weight
        steps = [PrepareElectron(+1)]
        if nucleus != target:
            steps.append(NuclearPulse("x", math.pi, nuclear_drive))
        res = run_circuit(steps, p, noise, rho0=branch, seed=seed, rtol=rtol,
                          atol=atol)
        branches.append((weight, res.final_state))
        timeline.append((timeline[-1][0] if timeline else 0.0,
                         f"branch {outcome}: weight {weight:.4f}"))
    final = sum(w * s for w, s in branches)
    return CircuitResult(p_electron_zero=p_zero, final_state=final,
                         timeline=timeline)


def nuclear_state_fidelity(rho, state: str) -> float:
    """<n|Tr_e(rho)|n> for n in {'up', 'down'}."""
    marginal = algebra.partial_trace_electron(rho)
    idx = algebra.NUCLEUS_UP if state == "up" else algebra.NUCLEUS_DOWN
    return float(np.real(marginal[idx, idx]))
