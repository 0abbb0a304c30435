"""Agreement between the compiled kernel and its pure-Python fallback."""

import numpy as np
import pytest

from nvgatesim import algebra, backend, dynamics
from nvgatesim.params import DriveParams, NoiseParams, Polarization

try:
    backend.get_kernel("compiled")
    HAVE_COMPILED = True
except ValueError:
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled extension not built")

DRIVE = DriveParams(omega0=2 * np.pi * 100e6, omega=0.0, phi=0.3,
                    polarization=Polarization.CIRCULAR_PLUS)


class TestSelection:
    def test_backend_name_is_valid(self):
        assert backend.backend_name() in ("python", "compiled")

    def test_default_kernel_matches_name(self):
        expected = backend.get_kernel(backend.backend_name())
        assert backend.get_kernel(None) is expected
        assert backend.get_kernel("") is expected

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            backend.get_kernel("fortran")


@needs_compiled
class TestAgreement:
    def test_schrodinger_states_match(self, params):
        model = dynamics.HamiltonianModel.from_params(params, DRIVE)
        psi0 = algebra.basis_state(0, True)
        kwargs = dict(t_final=50e-9, snapshots=11)
        res_py = dynamics.evolve_schrodinger(model, psi0,
                                             backend_name="python", **kwargs)
        res_c = dynamics.evolve_schrodinger(model, psi0,
                                            backend_name="compiled", **kwargs)
        for a, b in zip(res_py.states, res_c.states):
            assert np.max(np.abs(a - b)) < 1e-9

    def test_lindblad_states_match(self, params):
        noise = NoiseParams(gamma_e1=5e4, gamma_n2=2e4,
                            lambda_e=0.0, ensemble_size=1)
        model = dynamics.HamiltonianModel.from_params(params, DRIVE)
        rho0 = algebra.density_from_pure(algebra.basis_state(1, False))
        kwargs = dict(t_final=200e-9, snapshots=9)
        res_py = dynamics.evolve_lindblad(model, noise, rho0,
                                          backend_name="python", **kwargs)
        res_c = dynamics.evolve_lindblad(model, noise, rho0,
                                         backend_name="compiled", **kwargs)
        for a, b in zip(res_py.states, res_c.states):
            assert np.max(np.abs(a - b)) < 1e-9

    def test_step_counts_identical(self, params):
        # Same adaptive controller on both sides: the accepted-step count
        # must agree exactly, not just the final states.
        model = dynamics.HamiltonianModel.from_params(params, DRIVE)
        psi0 = algebra.basis_state(0, False)
        res_py = dynamics.evolve_schrodinger(model, psi0, 30e-9,
                                             backend_name="python")
        res_c = dynamics.evolve_schrodinger(model, psi0, 30e-9,
                                            backend_name="compiled")
        assert res_py.step_count == res_c.step_count
