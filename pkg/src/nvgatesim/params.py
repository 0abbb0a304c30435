"""Physical parameter containers.

All frequencies are stored as angular frequencies (rad/s); magnetic fields
are in tesla.  The ``defaults()`` constructors carry the standard 15NV-
numbers (zero-field splitting 2.87 GHz, hyperfine 3.03 / 3.65 MHz, strain
7 MHz, B = 50 mT).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

TWO_PI = 2.0 * math.pi


def cycles(f_hz):
    """Ordinary frequency in Hz -> angular frequency in rad/s."""
    return TWO_PI * f_hz


class Polarization(enum.Enum):
    UNPOLARIZED = "unpolarized"
    CIRCULAR_PLUS = "circular_plus"


@dataclass(frozen=True)
class SystemParams:
    """Static system constants and field settings.

    D, E, A_par, A_perp in rad/s; B in tesla; gamma_e, gamma_n in rad/s
    per tesla (gamma_n signed, negative for 15N).
    """

    D: float
    E: float
    A_par: float
    A_perp: float
    B: float
    gamma_e: float
    gamma_n: float

    @classmethod
    def defaults(cls):
        return cls(
            D=cycles(2.87e9),
            E=cycles(7.0e6),
            A_par=cycles(3.03e6),
            A_perp=cycles(3.65e6),
            B=50e-3,
            # mu_B/h = 14.0 MHz/mT, g_e = 2.00
            gamma_e=cycles(14.0e6 * 2.00 / 1e-3),
            # mu_N/h = 7.63 kHz/mT, g_n = -0.566
            gamma_n=cycles(7.63e3 * -0.566 / 1e-3),
        )

    def with_field(self, b_tesla):
        return replace(self, B=b_tesla)

    def validate(self):
        if self.D <= 0 or self.A_par <= 0 or self.A_perp <= 0:
            raise ValueError("D, A_par and A_perp must be positive")
        if self.gamma_e <= 0:
            raise ValueError("gamma_e must be positive")
        if self.gamma_n >= 0:
            raise ValueError("gamma_n must be negative for 15N")
        return self


@dataclass(frozen=True)
class DriveParams:
    """Electromagnetic drive: amplitude omega0 (rad/s), carrier omega
    (rad/s), phase phi (rad), and polarization mode."""

    omega0: float
    omega: float
    phi: float = 0.0
    polarization: Polarization = Polarization.UNPOLARIZED

    def validate(self):
        if self.omega0 < 0:
            raise ValueError("drive amplitude omega0 must be >= 0")
        return self

    @classmethod
    def off(cls):
        return cls(omega0=0.0, omega=0.0)


# Default coherence numbers: electron T1 = 100 s (CVD diamond below 80 K),
# electron T2* = 90 us, nuclear coherence ~1 s split as T2n = 1 s and
# T1n = 10 s.  These are assumptions, overridable everywhere.
_T1_E = 100.0
_T1_N = 10.0
_T2_N = 1.0
_T2_STAR_E = 90e-6


@dataclass(frozen=True)
class NoiseParams:
    """Lindblad rates (1/s), bath occupations, and the quasi-static
    electron dephasing strength lambda_e (rad/s) with ensemble size."""

    gamma_e1: float = 1.0 / _T1_E
    gamma_n1: float = 1.0 / _T1_N
    gamma_n2: float = 1.0 / (2.0 * _T2_N)
    nbar_e: float = 0.0
    nbar_n: float = 0.0
    lambda_e: float = math.sqrt(2.0) / _T2_STAR_E
    ensemble_size: int = 64

    @classmethod
    def defaults(cls):
        return cls()

    @classmethod
    def none(cls):
        """All decoherence channels off (coherent model)."""
        return cls(gamma_e1=0.0, gamma_n1=0.0, gamma_n2=0.0,
                   nbar_e=0.0, nbar_n=0.0, lambda_e=0.0, ensemble_size=1)

    def validate(self):
        for name in ("gamma_e1", "gamma_n1", "gamma_n2", "nbar_e", "nbar_n"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")
        return self
