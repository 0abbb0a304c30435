"""Dense complex linear algebra for the 6-level electron-nucleus system.

Basis convention (fixed globally): electron index major in the order
{+1, 0, -1}, nucleus index minor in the order {up, down}, so the composite
index is ``2*e + n``.  All operators are plain ``numpy`` complex arrays.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

# Tolerances referenced by the test suite; keep as named constants.
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-11
NORM_TOL = 1e-9

# Electron basis order {+1, 0, -1} -> row index.
ELECTRON_INDEX = {+1: 0, 0: 1, -1: 2}
# Nuclear basis order {up, down} -> row index.
NUCLEUS_UP = 0
NUCLEUS_DOWN = 1

DIM_ELECTRON = 3
DIM_NUCLEUS = 2
DIM = DIM_ELECTRON * DIM_NUCLEUS


def composite_index(m_s, nucleus_up):
    """Index of the basis state |m_s> x |up/down| in the 6-dim space."""
    e = ELECTRON_INDEX[m_s]
    n = NUCLEUS_UP if nucleus_up else NUCLEUS_DOWN
    return DIM_NUCLEUS * e + n


def basis_state(m_s, nucleus_up):
    """Product basis state as a normalized 6-vector."""
    psi = np.zeros(DIM, dtype=complex)
    psi[composite_index(m_s, nucleus_up)] = 1.0
    return psi


def spin1_operators():
    """Spin-1 operators {Sx, Sy, Sz, Sp, Sm} in the {+1, 0, -1} ordering."""
    sp = np.zeros((3, 3), dtype=complex)
    # S+ = sqrt(2)(|0><-1| + |+1><0|)
    sp[ELECTRON_INDEX[0], ELECTRON_INDEX[-1]] = np.sqrt(2.0)
    sp[ELECTRON_INDEX[+1], ELECTRON_INDEX[0]] = np.sqrt(2.0)
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return {"Sx": sx, "Sy": sy, "Sz": sz, "Sp": sp, "Sm": sm}


def spin_half_operators():
    """Spin-1/2 operators {Ix, Iy, Iz, Ip, Im} in the {up, down} ordering."""
    ip = np.zeros((2, 2), dtype=complex)
    ip[NUCLEUS_UP, NUCLEUS_DOWN] = 1.0  # I+ = |up><down|
    im = ip.conj().T
    ix = (ip + im) / 2.0
    iy = (ip - im) / 2.0j
    iz = np.diag([0.5, -0.5]).astype(complex)
    return {"Ix": ix, "Iy": iy, "Iz": iz, "Ip": ip, "Im": im}


def kron(a, b):
    """Kronecker product (electron factor first by convention)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


def matrix_exponential(h, scale=1.0):
    """exp(scale * h) for a square matrix.

    Hermitian inputs go through an eigendecomposition (exactly unitary for
    scale = -i*t); anything else falls back to scaling-and-squaring Pade
    (scipy.linalg.expm).
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix_exponential requires a square matrix, got {h.shape}")
    if is_hermitian(h, tol=1e-12 * max(1.0, np.max(np.abs(h)))):
        w, v = np.linalg.eigh(h)
        return (v * np.exp(scale * w)) @ v.conj().T
    return scipy.linalg.expm(scale * h)


def _as_density_6(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"expected a {DIM}x{DIM} density matrix, got {rho.shape}")
    return rho


def partial_trace_nucleus(rho):
    """Trace out the nuclear spin, leaving the 3x3 electron marginal."""
    rho = _as_density_6(rho)
    return np.trace(rho.reshape(3, 2, 3, 2), axis1=1, axis2=3)


def partial_trace_electron(rho):
    """Trace out the electron spin, leaving the 2x2 nuclear marginal."""
    rho = _as_density_6(rho)
    return np.trace(rho.reshape(3, 2, 3, 2), axis1=0, axis2=2)


def density_from_pure(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def state_fidelity_pure(rho, psi):
    """<psi| rho |psi> for a normalized pure target."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ np.asarray(rho, dtype=complex) @ psi))


# --- qubit subspace {|0>, |+1>} x {nuclear |0>=down, |1>=up} -----------------
#
# Logical 4-dim ordering: |e n> in {|00>, |01>, |10>, |11>} with the Fig. 1
# mapping: electron |0> -> logical 0, electron |+1> -> logical 1,
# nucleus down -> logical 0, nucleus up -> logical 1.

QUBIT_TO_FULL = np.array(
    [
        composite_index(0, nucleus_up=False),   # |00>
        composite_index(0, nucleus_up=True),    # |01>
        composite_index(+1, nucleus_up=False),  # |10>
        composite_index(+1, nucleus_up=True),   # |11>
    ]
)


def embed_qubit_state(psi4):
    """Lift a 4-dim qubit-subspace vector into the full 6-dim space."""
    psi4 = np.asarray(psi4, dtype=complex)
    psi = np.zeros(DIM, dtype=complex)
    psi[QUBIT_TO_FULL] = psi4
    return psi


def project_qubit_state(psi6):
    """Restrict a 6-dim vector to the 4-dim qubit subspace (no renorm)."""
    return np.asarray(psi6, dtype=complex)[QUBIT_TO_FULL]


def embed_qubit_operator(op4):
    """Lift a 4x4 qubit-subspace operator into the 6-dim space (zero elsewhere)."""
    op4 = np.asarray(op4, dtype=complex)
    op = np.zeros((DIM, DIM), dtype=complex)
    op[np.ix_(QUBIT_TO_FULL, QUBIT_TO_FULL)] = op4
    return op


def project_qubit_operator(op6):
    return np.asarray(op6, dtype=complex)[np.ix_(QUBIT_TO_FULL, QUBIT_TO_FULL)]
