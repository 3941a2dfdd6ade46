"""Thermal bosonic bath: transition rates gamma(omega) and Lamb-shift lookups.

Natural units throughout (hbar = k_B = 1).  Zero temperature is ``beta = math.inf``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import UndefinedAtZeroError


class Family(str, enum.Enum):
    FLAT = "flat"
    OHMIC = "ohmic"


@dataclass(frozen=True)
class SpectralDensity:
    """Bath spectral density g(|omega|).

    ``flat``:  g = amplitude.  ``ohmic``: g = amplitude * |omega|.
    The flat family has a divergent rate at omega = 0; ``gamma_zero_override``
    supplies the value wherever it is actually consumed.
    """

    family: Family = Family.FLAT
    amplitude: float = 1.0
    gamma_zero_override: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ValueError(f"amplitude must be positive and finite, got {self.amplitude}")
        if self.gamma_zero_override is not None:
            if not (math.isfinite(self.gamma_zero_override) and self.gamma_zero_override >= 0):
                raise ValueError("gamma_zero_override must be a non-negative finite number")

    def __call__(self, omega_abs: float) -> float:
        if self.family is Family.FLAT:
            return self.amplitude
        return self.amplitude * omega_abs


def _freq_key_match(table: Mapping[float, complex], omega: float) -> complex:
    tol = 1e-9 * max(abs(omega), 1.0)
    for key, value in table.items():
        if abs(key - omega) <= tol:
            return value
    return 0j


@dataclass(frozen=True)
class BathSpectrum:
    """Inverse temperature, spectral density and optional Lamb-shift table.

    ``lamb_shift`` maps a transition frequency to sigma(omega), which must be
    purely imaginary.  Frequencies missing from the table have sigma = 0.
    """

    beta: float
    density: SpectralDensity = field(default_factory=SpectralDensity)
    lamb_shift: Mapping[float, complex] = field(default_factory=dict)

    def __post_init__(self):
        if math.isnan(self.beta) or self.beta <= 0:
            raise ValueError(f"beta must be > 0 (math.inf for zero temperature), got {self.beta}")
        table = {}
        for omega, value in dict(self.lamb_shift).items():
            value = complex(value)
            if value.real != 0.0:
                raise ValueError(f"sigma({omega}) must be purely imaginary, got {value}")
            table[float(omega)] = complex(0.0, value.imag)
        object.__setattr__(self, "lamb_shift", table)

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def gamma(self, omega: float) -> float:
        return gamma(self, omega)

    def gamma_zero(self) -> float:
        return gamma_zero(self)

    def sigma(self, omega: float) -> complex:
        """Lamb-shift rate sigma(omega) (imaginary); zero when not tabulated."""
        return _freq_key_match(self.lamb_shift, float(omega))

    def has_gamma_zero(self) -> bool:
        return (
            self.density.family is Family.OHMIC or self.density.gamma_zero_override is not None
        )


def gamma(spectrum: BathSpectrum, omega: float) -> float:
    """Transition rate g(|w|) / |1 - exp(-beta w)|.

    Positive ``omega`` is emission into the bath (the system loses energy
    ``omega``); negative ``omega`` is absorption.
    """
    omega = float(omega)
    if not math.isfinite(omega):
        raise ValueError(f"omega must be finite, got {omega}")
    if omega == 0.0:
        return gamma_zero(spectrum)
    g = spectrum.density(abs(omega))
    beta = spectrum.beta
    if math.isinf(beta):
        return g if omega > 0 else 0.0
    x = beta * omega
    # expm1 keeps precision for small |x|; absorption uses e^x / (1 - e^x) to avoid overflow
    if x > 0:
        return g / -math.expm1(-x)
    return g * math.exp(x) / -math.expm1(x)


def gamma_zero(spectrum: BathSpectrum) -> float:
    """Zero-frequency rate: amplitude/beta (ohmic limit) or the flat override."""
    density = spectrum.density
    if density.gamma_zero_override is not None:
        return float(density.gamma_zero_override)
    if density.family is Family.OHMIC:
        return 0.0 if math.isinf(spectrum.beta) else density.amplitude / spectrum.beta
    raise UndefinedAtZeroError(
        "gamma(0) diverges for a flat spectral density; set gamma_zero_override"
    )


def gamma_array(spectrum: BathSpectrum, omegas) -> np.ndarray:
    return np.array([gamma(spectrum, w) for w in np.atleast_1d(omegas)], dtype=float)
