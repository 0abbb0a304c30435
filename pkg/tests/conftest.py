"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from nvgatesim.params import DriveParams, NoiseParams, SystemParams


@pytest.fixture(scope="session")
def params():
    return SystemParams.defaults()


@pytest.fixture(scope="session")
def no_noise():
    return NoiseParams.none()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, dim=6):
    """Haar-ish random pure state."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim=6, rank=3):
    vs = rng.standard_normal((rank, dim)) + 1j * rng.standard_normal((rank, dim))
    rho = sum(np.outer(v, v.conj()) for v in vs)
    return rho / np.trace(rho)


def random_drive(rng, max_omega0=None):
    from nvgatesim.params import cycles
    omega0 = rng.uniform(1e6, 300e6)
    return DriveParams(omega0=cycles(omega0),
                       omega=cycles(rng.uniform(1e6, 4e9)),
                       phi=rng.uniform(-np.pi, np.pi))
