"""Operator algebra and state-space bookkeeping."""

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from nvgatesim import algebra

from conftest import random_density, random_state


def _complex_vectors(dim):
    finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
    return st.lists(st.tuples(finite, finite), min_size=dim, max_size=dim).map(
        lambda pairs: np.array([a + 1j * b for a, b in pairs]))


class TestSpinOperators:
    def test_spin1_commutators(self):
        s = algebra.spin1_operators()
        sx, sy, sz = s["Sx"], s["Sy"], s["Sz"]
        assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-14
        assert np.max(np.abs(sy @ sz - sz @ sy - 1j * sx)) < 1e-14
        assert np.max(np.abs(sz @ sx - sx @ sz - 1j * sy)) < 1e-14

    def test_spin_half_commutators(self):
        i = algebra.spin_half_operators()
        ix, iy, iz = i["Ix"], i["Iy"], i["Iz"]
        assert np.max(np.abs(ix @ iy - iy @ ix - 1j * iz)) < 1e-14
        assert np.max(np.abs(iy @ iz - iz @ iy - 1j * ix)) < 1e-14
        assert np.max(np.abs(iz @ ix - ix @ iz - 1j * iy)) < 1e-14

    def test_casimir(self):
        s = algebra.spin1_operators()
        total = sum(s[k] @ s[k] for k in ("Sx", "Sy", "Sz"))
        assert np.allclose(total, 2.0 * np.eye(3), atol=1e-14)
        i = algebra.spin_half_operators()
        total = sum(i[k] @ i[k] for k in ("Ix", "Iy", "Iz"))
        assert np.allclose(total, 0.75 * np.eye(2), atol=1e-14)

    def test_ladder_action(self):
        s = algebra.spin1_operators()
        up = np.zeros(3)
        up[algebra.ELECTRON_INDEX[0]] = 1.0
        raised = s["Sp"] @ up
        assert raised[algebra.ELECTRON_INDEX[+1]] == pytest.approx(np.sqrt(2))

    def test_hermiticity(self):
        for ops in (algebra.spin1_operators(), algebra.spin_half_operators()):
            for name, op in ops.items():
                if name[-1] in "xyz":
                    assert algebra.is_hermitian(op, 1e-15)


class TestIndexing:
    def test_composite_index_bijection(self):
        seen = {algebra.composite_index(m, up)
                for m in (+1, 0, -1) for up in (True, False)}
        assert seen == set(range(algebra.DIM))

    def test_index_layout(self):
        # nucleus is the fast index
        for m in (+1, 0, -1):
            up = algebra.composite_index(m, True)
            down = algebra.composite_index(m, False)
            assert down == up + 1
            assert up == 2 * algebra.ELECTRON_INDEX[m]

    def test_basis_state(self):
        psi = algebra.basis_state(-1, True)
        assert psi[algebra.composite_index(-1, True)] == 1.0
        assert np.linalg.norm(psi) == 1.0


class TestQubitSubspace:
    def test_state_roundtrip(self, rng):
        psi4 = random_state(rng, 4)
        back = algebra.project_qubit_state(algebra.embed_qubit_state(psi4))
        assert np.allclose(back, psi4, atol=1e-15)

    def test_embed_leaves_minus_one_empty(self, rng):
        psi = algebra.embed_qubit_state(random_state(rng, 4))
        for up in (True, False):
            assert psi[algebra.composite_index(-1, up)] == 0.0

    def test_operator_roundtrip(self, rng):
        op4 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        back = algebra.project_qubit_operator(algebra.embed_qubit_operator(op4))
        assert np.allclose(back, op4, atol=1e-15)


class TestPartialTraces:
    def test_marginal_shapes(self, rng):
        rho = random_density(rng)
        assert algebra.partial_trace_nucleus(rho).shape == (3, 3)
        assert algebra.partial_trace_electron(rho).shape == (2, 2)

    def test_marginals_unit_trace(self, rng):
        rho = random_density(rng)
        assert np.trace(algebra.partial_trace_nucleus(rho)) == pytest.approx(1.0)
        assert np.trace(algebra.partial_trace_electron(rho)) == pytest.approx(1.0)

    def test_product_state_factorizes(self, rng):
        rho_e = random_density(rng, dim=3, rank=2)
        rho_n = random_density(rng, dim=2, rank=2)
        rho = algebra.kron(rho_e, rho_n)
        assert np.allclose(algebra.partial_trace_nucleus(rho), rho_e, atol=1e-12)
        assert np.allclose(algebra.partial_trace_electron(rho), rho_n, atol=1e-12)

    def test_basis_state_marginals(self):
        rho = algebra.density_from_pure(algebra.basis_state(+1, False))
        elec = algebra.partial_trace_nucleus(rho)
        assert elec[algebra.ELECTRON_INDEX[+1],
                    algebra.ELECTRON_INDEX[+1]] == pytest.approx(1.0)
        nuc = algebra.partial_trace_electron(rho)
        assert nuc[algebra.NUCLEUS_DOWN,
                   algebra.NUCLEUS_DOWN] == pytest.approx(1.0)


class TestDensityAndFidelity:
    @settings(max_examples=25, deadline=None)
    @given(_complex_vectors(6))
    def test_density_from_pure_properties(self, v):
        norm = np.linalg.norm(v)
        if norm < 1e-6:
            return
        psi = v / norm
        rho = algebra.density_from_pure(psi)
        assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
        assert algebra.is_hermitian(rho, 1e-12)
        # purity
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-12)

    def test_fidelity_extremes(self):
        a = algebra.basis_state(0, False)
        b = algebra.basis_state(+1, False)
        rho = algebra.density_from_pure(a)
        assert algebra.state_fidelity_pure(rho, a) == pytest.approx(1.0)
        assert algebra.state_fidelity_pure(rho, b) == pytest.approx(0.0, abs=1e-15)

    @settings(max_examples=25, deadline=None)
    @given(_complex_vectors(6), _complex_vectors(6))
    def test_fidelity_matches_overlap(self, u, v):
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu < 1e-6 or nv < 1e-6:
            return
        u, v = u / nu, v / nv
        rho = algebra.density_from_pure(u)
        expected = abs(np.vdot(v, u)) ** 2
        assert algebra.state_fidelity_pure(rho, v) == pytest.approx(
            expected, abs=1e-12)


class TestMatrixExponential:
    def test_hermitian_matches_scipy(self, rng):
        h = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        h = (h + h.conj().T) / 2.0
        got = algebra.matrix_exponential(h, scale=-1j * 0.37)
        assert np.allclose(got, scipy.linalg.expm(-1j * 0.37 * h), atol=1e-12)

    def test_hermitian_generator_is_unitary(self, rng):
        h = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        h = (h + h.conj().T) / 2.0
        u = algebra.matrix_exponential(h, scale=-1j * 2.1)
        assert np.max(np.abs(u @ u.conj().T - np.eye(6))) < 1e-13

    def test_general_matrix(self, rng):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert np.allclose(algebra.matrix_exponential(m),
                           scipy.linalg.expm(m), atol=1e-12)


def test_kron_convention():
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([1.0, -1.0])
    k = algebra.kron(a, b)
    assert k.shape == (6, 6)
    # electron-major ordering: diag = (1,-1, 2,-2, 3,-3)
    assert np.allclose(np.diag(k), [1, -1, 2, -2, 3, -3])
