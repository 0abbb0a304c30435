"""Pulse-sequence execution: composition, measurement, and the
characterization circuits."""

import math

import numpy as np
import pytest

from nvgatesim import algebra, circuits, dynamics, gates
from nvgatesim.params import (DriveParams, NoiseParams, Polarization,
                              SystemParams, cycles)

P = SystemParams.defaults()
COHERENT = NoiseParams.none()
EDRIVE = DriveParams(omega0=cycles(250e6), omega=0.0,
                     polarization=Polarization.CIRCULAR_PLUS)
NDRIVE = DriveParams(omega0=cycles(140e6), omega=0.0)


def _run(steps, **kw):
    return circuits.run_circuit(steps, P, COHERENT, **kw)


class TestValidation:
    def test_bad_axis_rejected(self):
        with pytest.raises(ValueError):
            _run([circuits.ElectronPulse("z", math.pi, EDRIVE)])

    def test_bad_angle_rejected(self):
        with pytest.raises(ValueError):
            _run([circuits.ElectronPulse("x", 3.0 * math.pi, EDRIVE)])

    def test_bad_keep_rejected(self):
        with pytest.raises(ValueError):
            _run([circuits.MeasureElectronZ(keep="maybe")])

    def test_unknown_step_rejected(self):
        with pytest.raises(TypeError):
            _run(["not a step"])


class TestPreparation:
    def test_prepare_electron(self):
        res = _run([circuits.PrepareElectron(+1)])
        marg = algebra.partial_trace_nucleus(res.final_state)
        assert np.real(marg[algebra.ELECTRON_INDEX[+1],
                            algebra.ELECTRON_INDEX[+1]]) \
            == pytest.approx(1.0, abs=1e-12)

    def test_prepare_nucleus(self):
        res = _run([circuits.PrepareNucleus("up")])
        marg = algebra.partial_trace_electron(res.final_state)
        assert np.real(marg[algebra.NUCLEUS_UP, algebra.NUCLEUS_UP]) \
            == pytest.approx(1.0, abs=1e-12)

    def test_preparation_keeps_other_subsystem(self):
        res = _run([circuits.PrepareElectron(0), circuits.PrepareNucleus("up"),
                    circuits.PrepareElectron(+1)])
        marg = algebra.partial_trace_electron(res.final_state)
        assert np.real(marg[algebra.NUCLEUS_UP, algebra.NUCLEUS_UP]) \
            == pytest.approx(1.0, abs=1e-10)


class TestPulses:
    def test_pi_pulse_flips_electron(self):
        res = _run([circuits.ElectronPulse("x", math.pi, EDRIVE)])
        assert res.p_electron_zero is None
        assert circuits.electron_zero_probability(res.final_state) \
            == pytest.approx(0.0, abs=5e-3)

    def test_half_pi_pulse_splits_population(self):
        res = _run([circuits.ElectronPulse("x", math.pi / 2, EDRIVE)])
        assert circuits.electron_zero_probability(res.final_state) \
            == pytest.approx(0.5, abs=5e-3)

    def test_two_quarters_compose_to_half(self):
        """Carrier-phase coherence across steps: two pi/2 pulses equal one
        pi pulse."""
        split = _run([circuits.ElectronPulse("x", math.pi / 2, EDRIVE),
                      circuits.ElectronPulse("x", math.pi / 2, EDRIVE)])
        assert circuits.electron_zero_probability(split.final_state) \
            == pytest.approx(0.0, abs=1e-2)

    def test_wait_matches_static_propagation(self):
        t = 80e-9
        res = _run([circuits.Wait(t)])
        model = dynamics.HamiltonianModel.from_params(P)
        rho0 = algebra.density_from_pure(algebra.basis_state(0, False))
        expected = dynamics.propagate_static(model, COHERENT, rho0, t)
        assert np.max(np.abs(res.final_state - expected)) < 1e-10

    def test_nuclear_pi_pulse_flips_nucleus(self):
        res = _run([circuits.PrepareElectron(+1),
                    circuits.NuclearPulse("x", math.pi, NDRIVE)])
        marg = algebra.partial_trace_electron(res.final_state)
        assert np.real(marg[algebra.NUCLEUS_UP, algebra.NUCLEUS_UP]) \
            == pytest.approx(1.0, abs=5e-3)

    def test_timeline_is_monotonic(self):
        res = _run([circuits.ElectronPulse("x", math.pi / 2, EDRIVE),
                    circuits.Wait(50e-9),
                    circuits.ElectronPulse("y", math.pi / 2, EDRIVE)])
        times = [entry[0] for entry in res.timeline]
        assert times == sorted(times)


class TestMeasurement:
    def test_born_probability_matches_nonprojective_readout(self):
        prep = [circuits.ElectronPulse("x", math.pi / 2, EDRIVE)]
        peek = _run(prep + [circuits.MeasureElectronZ(project=False)])
        proj = _run(prep + [circuits.MeasureElectronZ(project=True)])
        assert peek.p_electron_zero == pytest.approx(proj.p_electron_zero,
                                                     abs=1e-12)
        # non-projective readout leaves the state untouched
        bare = _run(prep)
        assert np.max(np.abs(peek.final_state - bare.final_state)) < 1e-12

    def test_projection_preserves_trace(self):
        res = _run([circuits.ElectronPulse("x", math.pi / 2, EDRIVE),
                    circuits.MeasureElectronZ(project=True, keep="both")])
        assert np.trace(res.final_state).real == pytest.approx(1.0, abs=1e-10)

    def test_postselection_renormalizes(self):
        res = _run([circuits.ElectronPulse("x", math.pi / 2, EDRIVE),
                    circuits.MeasureElectronZ(project=True, keep="zero")])
        assert np.trace(res.final_state).real == pytest.approx(1.0, abs=1e-10)
        assert circuits.electron_zero_probability(res.final_state) \
            == pytest.approx(1.0, abs=1e-10)

    def test_confusion_mixes_reported_probability(self):
        prep = [circuits.ElectronPulse("x", math.pi / 2, EDRIVE)]
        clean = _run(prep + [circuits.MeasureElectronZ(project=False)])
        fuzzy = _run(prep + [circuits.MeasureElectronZ(project=False,
                                                       confusion=0.2)])
        p = clean.p_electron_zero
        assert fuzzy.p_electron_zero == pytest.approx(p * 0.8 + (1 - p) * 0.2,
                                                      abs=1e-12)


class TestNucleusReadout:
    def test_down_maps_to_low_probability(self):
        res = circuits.measure_nucleus_z(P, COHERENT)
        assert res.p_electron_zero < 0.01

    def test_up_maps_to_high_probability(self):
        rho0 = algebra.density_from_pure(algebra.basis_state(0, True))
        res = circuits.measure_nucleus_z(P, COHERENT, rho0=rho0)
        assert res.p_electron_zero > 0.99

    def test_basis_rotation_interpolates(self):
        """A conditional nuclear rotation by label angle a turns the readout
        into P(|0>) = sin^2(a)."""
        label = math.pi / 4
        rot = circuits.NuclearPulse("x", 2.0 * label, NDRIVE)
        res = circuits.measure_nucleus_z(P, COHERENT, basis_rotation=rot)
        assert res.p_electron_zero == pytest.approx(math.sin(label) ** 2,
                                                    abs=0.01)


class TestInitializeNucleus:
    @pytest.mark.parametrize("target", ["down", "up"])
    def test_prepares_target_from_mixed(self, target):
        res = circuits.initialize_nucleus(P, COHERENT, target=target)
        assert circuits.nuclear_state_fidelity(res.final_state, target) > 0.99

    def test_idempotent(self):
        first = circuits.initialize_nucleus(P, COHERENT, target="down")
        again = circuits.initialize_nucleus(P, COHERENT, target="down",
                                            rho0=first.final_state)
        f1 = circuits.nuclear_state_fidelity(first.final_state, "down")
        f2 = circuits.nuclear_state_fidelity(again.final_state, "down")
        assert f2 >= f1 - 5e-3


class TestHyperfineCharacterization:
    def test_recovers_coupling_noiseless(self):
        waits = np.linspace(0.0, 2.0e-6, 41)
        out = circuits.characterize_hyperfine(P, COHERENT, waits)
        assert abs(out.fitted_a_par / P.A_par - 1.0) < 0.01

    def test_fringe_shape(self):
        """The Ramsey fringe is a quadrature sinusoid at half the hyperfine
        frequency: it starts near 1/2 and its fitted rate is ~A_par/2."""
        waits = np.linspace(0.0, 2.0e-6, 41)
        out = circuits.characterize_hyperfine(P, COHERENT, waits)
        assert out.p_electron_zero[0] == pytest.approx(0.5, abs=0.02)
        assert abs(out.fit_frequency) == pytest.approx(P.A_par / 2.0, rel=0.02)
        assert np.all(out.p_electron_zero > -1e-9)
        assert np.all(out.p_electron_zero < 1.0 + 1e-9)


class TestEnsembleNoise:
    def test_seeded_runs_reproduce(self):
        noise = NoiseParams(gamma_e1=0.0, gamma_n1=0.0, gamma_n2=0.0,
                            lambda_e=math.sqrt(2.0) / 90e-6, ensemble_size=4)
        steps = [circuits.ElectronPulse("x", math.pi / 2, EDRIVE),
                 circuits.Wait(30e-6),
                 circuits.ElectronPulse("y", math.pi / 2, EDRIVE),
                 circuits.MeasureElectronZ(project=False)]
        a = circuits.run_circuit(steps, P, noise, seed=9)
        b = circuits.run_circuit(steps, P, noise, seed=9)
        assert a.p_electron_zero == b.p_electron_zero
        c = circuits.run_circuit(steps, P, noise, seed=10)
        assert c.p_electron_zero != a.p_electron_zero
