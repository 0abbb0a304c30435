"""Hamiltonian construction and closed-form resonance/drive expressions.

Lab-frame pieces: H = H0 + H_strain + H_hyperfine + H_drive, all in units
of hbar = 1 (angular frequency).  The interaction picture is taken with
respect to H0, which is diagonal in the fixed product basis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import algebra
from .algebra import DIM, basis_state, composite_index, kron
from .params import DriveParams, Polarization, SystemParams

_S = algebra.spin1_operators()
_I = algebra.spin_half_operators()
_ID2 = np.eye(2, dtype=complex)
_ID3 = np.eye(3, dtype=complex)

# 6-dim embeddings of the single-spin operators.
SZ6 = kron(_S["Sz"], _ID2)
SX6 = kron(_S["Sx"], _ID2)
IZ6 = kron(_ID3, _I["Iz"])
IX6 = kron(_ID3, _I["Ix"])


class Lineshape(enum.Enum):
    LORENTZIAN = "lorentzian"


@dataclass(frozen=True)
class Resonance:
    center: float   # tesla
    fwhm: float     # tesla
    lineshape: Lineshape = Lineshape.LORENTZIAN


@dataclass(frozen=True)
class StrainResonances:
    up: Resonance       # nucleus |up>
    down: Resonance     # nucleus |down>
    shift: float        # |numeric center| vs A_par/(2 gamma_e), magnitude, tesla


@dataclass(frozen=True)
class ExchangeResonances:
    minus: Resonance    # negative-field branch
    plus: Resonance     # positive-field branch


def delta_plus(p: SystemParams) -> float:
    return p.D + p.B * p.gamma_e + p.B * p.gamma_n


def delta_minus(p: SystemParams) -> float:
    return p.D - p.B * p.gamma_e - p.B * p.gamma_n


def h0(p: SystemParams) -> np.ndarray:
    """Zero-field splitting plus electron/nuclear Zeeman terms (diagonal)."""
    sz2 = _S["Sz"] @ _S["Sz"]
    return (p.D * kron(sz2, _ID2)
            + p.B * p.gamma_e * SZ6
            - p.B * p.gamma_n * IZ6)


def h_strain(p: SystemParams) -> np.ndarray:
    """Strain term (E/2)(S+^2 + S-^2), coupling |+1> and |-1|."""
    sp2 = _S["Sp"] @ _S["Sp"]
    return (p.E / 2.0) * kron(sp2 + sp2.conj().T, _ID2)


def h_hyperfine(p: SystemParams) -> np.ndarray:
    """Hyperfine coupling A_par Sz Iz + (A_perp/2)(S+I- + S-I+)."""
    flip = kron(_S["Sp"], _I["Im"]) + kron(_S["Sm"], _I["Ip"])
    return p.A_par * kron(_S["Sz"], _I["Iz"]) + (p.A_perp / 2.0) * flip


def _electron_drive_matrix(pol: Polarization) -> np.ndarray:
    """Electron part of the drive operator for the given polarization."""
    if pol is Polarization.CIRCULAR_PLUS:
        # Keep only the |0> <-> |+1> matrix elements of Sx.
        m = np.zeros((3, 3), dtype=complex)
        i0, ip1 = algebra.ELECTRON_INDEX[0], algebra.ELECTRON_INDEX[+1]
        m[ip1, i0] = _S["Sx"][ip1, i0]
        m[i0, ip1] = _S["Sx"][i0, ip1]
        return m
    return _S["Sx"]


def drive_operator(p: SystemParams, d: DriveParams) -> np.ndarray:
    """Operator multiplying omega0*cos(omega*t + phi) in H_drive."""
    return (kron(_electron_drive_matrix(d.polarization), _ID2)
            - (p.gamma_n / p.gamma_e) * IX6)


def h_drive(p: SystemParams, d: DriveParams, t: float) -> np.ndarray:
    return d.omega0 * math.cos(d.omega * t + d.phi) * drive_operator(p, d)


def static_hamiltonian(p: SystemParams) -> np.ndarray:
    """Drive-off lab-frame Hamiltonian h0 + strain + hyperfine."""
    return h0(p) + h_strain(p) + h_hyperfine(p)


def h_total(p: SystemParams, d: DriveParams, t: float) -> np.ndarray:
    return static_hamiltonian(p) + h_drive(p, d, t)


def interaction_picture_h(p: SystemParams, d: DriveParams, t: float) -> np.ndarray:
    """Closed-form interaction-picture Hamiltonian w.r.t. H0.

    Equals exp(i*H0*t) (H - H0) exp(-i*H0*t); the explicit phase factors
    use Delta_pm = D +- B*gamma_e +- B*gamma_n.
    """
    dp, dm = delta_plus(p), delta_minus(p)
    bge = p.B * p.gamma_e
    bgn = p.B * p.gamma_n

    def ket_bra(a, b):
        m = np.zeros((3, 3), dtype=complex)
        m[algebra.ELECTRON_INDEX[a], algebra.ELECTRON_INDEX[b]] = 1.0
        return m

    # Strain: E |+1><-1| e^{i 2 B gamma_e t} + h.c.
    hs = p.E * np.exp(1j * 2.0 * bge * t) * kron(ket_bra(+1, -1), _ID2)
    hs = hs + hs.conj().T

    # Hyperfine: parallel part commutes with H0; flip-flop carries Delta_pm.
    hhf = p.A_par * kron(_S["Sz"], _I["Iz"])
    ff = (p.A_perp / math.sqrt(2.0)) * (
        np.exp(1j * dp * t) * kron(ket_bra(+1, 0), _I["Im"])
        + np.exp(-1j * dm * t) * kron(ket_bra(0, -1), _I["Im"])
    )
    hhf = hhf + ff + ff.conj().T

    # Drive: electron ladder elements with e^{+-i(D +- B gamma_e)t}, nuclear
    # term with e^{-i B gamma_n t}; electron elements follow polarization.
    cosv = math.cos(d.omega * t + d.phi)
    e_elems = np.exp(1j * (p.D + bge) * t) * kron(ket_bra(+1, 0), _ID2)
    if d.polarization is not Polarization.CIRCULAR_PLUS:
        e_elems = e_elems + np.exp(-1j * (p.D - bge) * t) * kron(ket_bra(0, -1), _ID2)
    n_elem = -(p.gamma_n / (math.sqrt(2.0) * p.gamma_e)) * np.exp(-1j * bgn * t) \
        * kron(_ID3, _I["Ip"])
    hd = (d.omega0 / math.sqrt(2.0)) * cosv * (e_elems + n_elem)
    hd = hd + hd.conj().T

    return hs + hhf + hd


# --- effective qubit-subspace Hamiltonians -----------------------------------

_IZ_LOGICAL = np.kron(np.eye(2), np.diag([-0.5, 0.5])).astype(complex)
_P1_LOGICAL = np.kron(np.diag([0.0, 1.0]), np.eye(2)).astype(complex)
_P0_LOGICAL = np.kron(np.diag([1.0, 0.0]), np.eye(2)).astype(complex)
_X_LOGICAL = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2)).astype(complex)


def effective_cz_h(p: SystemParams) -> np.ndarray:
    """Static effective Hamiltonian on the qubit subspace, including the
    strain and perpendicular-hyperfine level shifts.

    Logical ordering {|00>, |01>, |10>, |11>} with electron |0>,|+1> ->
    0,1 and nucleus down,up -> 0,1.
    """
    dp, dm = delta_plus(p), delta_minus(p)
    if dp == 0.0 or dm == 0.0:
        raise ZeroDivisionError("Delta_pm vanishes: on an exchange resonance")
    if p.B * p.gamma_e == 0.0:
        raise ZeroDivisionError("B*gamma_e vanishes: strain shift diverges")
    a2 = p.A_perp ** 2
    return ((p.A_par + a2 / (2 * dp)) * _P1_LOGICAL @ _IZ_LOGICAL
            - (a2 / (2 * dp) + a2 / (2 * dm)) * _P0_LOGICAL @ _IZ_LOGICAL
            + (p.E ** 2 / (2 * p.B * p.gamma_e) - a2 / (4 * dp)) * _P1_LOGICAL
            - (a2 / (4 * dp) - a2 / (4 * dm)) * _P0_LOGICAL)


def effective_driven_h(p: SystemParams, d: DriveParams) -> np.ndarray:
    """RWA model for the resonantly driven electron qubit (drive at
    nu = D + B*gamma_e, phi = -pi)."""
    return (p.A_par * _P1_LOGICAL @ _IZ_LOGICAL
            - (d.omega0 / (2.0 * math.sqrt(2.0))) * _X_LOGICAL)


# --- resonance calculators ---------------------------------------------------

def _strain_gap(p: SystemParams, b: float, nucleus_up: bool) -> float:
    """Gap between the two dressed levels carried by |+1,n> and |-1,n>."""
    h = static_hamiltonian(p.with_field(b))
    w, v = np.linalg.eigh(h)
    ia = composite_index(+1, nucleus_up)
    ib = composite_index(-1, nucleus_up)
    weights = np.abs(v[ia, :]) ** 2 + np.abs(v[ib, :]) ** 2
    top = np.argsort(weights)[-2:]
    return abs(w[top[0]] - w[top[1]])


def _locate_avoided_crossing(p, guess, nucleus_up, half_window=50e-6):
    res = scipy.optimize.minimize_scalar(
        lambda b: _strain_gap(p, b, nucleus_up),
        bounds=(guess - half_window, guess + half_window),
        method="bounded",
        options={"xatol": 1e-9},
    )
    return float(res.x)


def strain_resonance(p: SystemParams) -> StrainResonances:
    """Strain-induced |+1><->|-1> resonances vs axial field.

    Analytic centers are -+ A_par/(2 gamma_e) for nucleus up/down; the
    returned centers come from a numeric avoided-crossing search on the
    full static Hamiltonian, which picks up the hyperfine-induced shift.

    The shift is reported as a magnitude: both centers move toward zero
    by the same amount because only the crossing state that flip-flop
    couples to |0> (via A_perp) is level-shifted, and the perturbative
    value A_perp**2 / (2 * Delta_plus * 2 * gamma_e) is nuclear-state
    symmetric.  At default parameters this is ~41 nT.
    """
    if p.gamma_e == 0.0:
        raise ZeroDivisionError("gamma_e must be nonzero")
    b0 = p.A_par / (2.0 * p.gamma_e)
    fwhm = 2.0 * p.E / p.gamma_e
    c_up = _locate_avoided_crossing(p, -b0, nucleus_up=True)
    c_down = _locate_avoided_crossing(p, +b0, nucleus_up=False)
    shift = 0.5 * (abs(c_up - (-b0)) + abs(c_down - b0))
    return StrainResonances(
        up=Resonance(center=c_up, fwhm=fwhm),
        down=Resonance(center=c_down, fwhm=fwhm),
        shift=shift,
    )


def exchange_resonance(p: SystemParams) -> ExchangeResonances:
    """Exchange (flip-flop) resonances B_ex = (A_par/2 -+ D)/(gamma_e +- gamma_n)
    with Lorentzian fwhm 2*sqrt(2)*A_perp/(gamma_e + gamma_n)."""
    if p.gamma_e + p.gamma_n == 0.0:
        raise ZeroDivisionError("gamma_e + gamma_n must be nonzero")
    fwhm = 2.0 * math.sqrt(2.0) * p.A_perp / (p.gamma_e + p.gamma_n)
    b_minus = (p.A_par / 2.0 - p.D) / (p.gamma_e + p.gamma_n)
    b_plus = (p.A_par / 2.0 + p.D) / (p.gamma_e - p.gamma_n)
    return ExchangeResonances(
        minus=Resonance(center=b_minus, fwhm=fwhm),
        plus=Resonance(center=b_plus, fwhm=fwhm),
    )


# --- nuclear drive closed forms ---------------------------------------------

def nuclear_drive_frequency(p: SystemParams) -> float:
    """Drive frequency nu = A_par - B*gamma_n + A_perp^2/(2D + 2B*gamma_e)
    for nuclear rotations with the electron prepared in |+1>."""
    denom = 2.0 * p.D + 2.0 * p.B * p.gamma_e
    if denom == 0.0:
        raise ZeroDivisionError("2D + 2B*gamma_e vanishes")
    return p.A_par - p.B * p.gamma_n + p.A_perp ** 2 / denom


def nuclear_rabi_rate(p: SystemParams, d: DriveParams) -> float:
    """Effective nuclear Rabi rate (electron in |+1>):
    (omega0/4)|A_perp/(D + B*gamma_e) - gamma_n/gamma_e|.

    The rotation angle after time t is 2*rate*t.
    """
    denom = p.D + p.B * p.gamma_e
    if denom == 0.0:
        raise ZeroDivisionError("D + B*gamma_e vanishes")
    return (d.omega0 / 4.0) * abs(p.A_perp / denom - p.gamma_n / p.gamma_e)


def nuclear_rabi_rate_electron0(p: SystemParams, d: DriveParams) -> float:
    """Effective nuclear Rabi rate with the electron polarized in |0>.

    Both electron levels |+-1> contribute second-order (drive + flip-flop)
    paths with the SAME sign, on top of the direct nuclear drive:
    (omega0/4)|A_perp*(1/(D + B*ge) + 1/(D - B*ge)) + gamma_n/gamma_e|.
    """
    da = p.D + p.B * p.gamma_e
    db = p.D - p.B * p.gamma_e
    if da == 0.0 or db == 0.0:
        raise ZeroDivisionError("D +- B*gamma_e vanishes")
    return (d.omega0 / 4.0) * abs(p.A_perp * (1.0 / da + 1.0 / db)
                                  + p.gamma_n / p.gamma_e)


def nuclear_null_field(p: SystemParams) -> float:
    """Field where the two nuclear drive routes interfere destructively:
    B = (A_perp*gamma_e/gamma_n - D)/gamma_e (about -0.948 T at defaults)."""
    return (p.A_perp * p.gamma_e / p.gamma_n - p.D) / p.gamma_e


# --- exact dressed levels ----------------------------------------------------

def exact_level_energies(p: SystemParams) -> np.ndarray:
    """Eigenvalues of the static Hamiltonian matched to the product basis
    by maximum eigenvector overlap; index order is the fixed basis order."""
    w, v = np.linalg.eigh(static_hamiltonian(p))
    energies = np.empty(DIM)
    taken = np.zeros(DIM, dtype=bool)
    for i in range(DIM):
        weights = np.abs(v[i, :]) ** 2
        weights[taken] = -1.0
        j = int(np.argmax(weights))
        taken[j] = True
        energies[i] = w[j]
    return energies


def exact_transition_frequency(p: SystemParams, state_a, state_b) -> float:
    """|E_a - E_b| between two dressed levels labelled by (m_s, nucleus_up)."""
    en = exact_level_energies(p)
    ia = composite_index(*state_a)
    ib = composite_index(*state_b)
    return abs(en[ia] - en[ib])


def nuclear_transition_frequency(p: SystemParams, m_s: int) -> float:
    """Exact dressed nuclear splitting with the electron in level m_s."""
    return exact_transition_frequency(p, (m_s, True), (m_s, False))
