import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from bmsrelax.bath import BathSpectrum, SpectralDensity, gamma, gamma_zero
from bmsrelax.errors import UndefinedAtZeroError

FLAT2 = SpectralDensity("flat", 2.0)


def test_emission_rate_flat():
    # frozen value; reference computed with mpmath at 30 digits
    ref = float(2 / (1 - mpmath.e ** -1))
    assert ref == pytest.approx(3.16395, abs=1e-5)
    assert gamma(BathSpectrum(1.0, FLAT2), 1.0) == pytest.approx(ref, rel=1e-14)


def test_absorption_rate_flat():
    ref = float(2 / (mpmath.e - 1))
    assert ref == pytest.approx(1.16395, abs=1e-5)
    assert gamma(BathSpectrum(1.0, FLAT2), -1.0) == pytest.approx(ref, rel=1e-14)


def test_zero_temperature_no_absorption():
    bath = BathSpectrum(math.inf, FLAT2)
    assert gamma(bath, -1.0) == 0.0
    assert gamma(bath, 1.0) == 2.0


def test_gamma_zero_ohmic_limit():
    bath = BathSpectrum(2.0, SpectralDensity("ohmic", 1.0))
    assert gamma_zero(bath) == 0.5
    # limit from the finite-frequency formula
    assert gamma(bath, 1e-7) == pytest.approx(0.5, rel=1e-6)
    assert gamma(bath, 0.0) == 0.5


def test_gamma_zero_override():
    bath = BathSpectrum(1.0, SpectralDensity("flat", 2.0, gamma_zero_override=1.0))
    assert gamma_zero(bath) == 1.0
    assert gamma(bath, 0.0) == 1.0


def test_gamma_zero_flat_without_override_fails():
    bath = BathSpectrum(1.0, FLAT2)
    with pytest.raises(UndefinedAtZeroError):
        gamma_zero(bath)
    with pytest.raises(UndefinedAtZeroError):
        gamma(bath, 0.0)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        SpectralDensity("flat", 0.0)
    with pytest.raises(ValueError):
        BathSpectrum(0.0)
    with pytest.raises(ValueError):
        BathSpectrum(-1.0)
    with pytest.raises(ValueError):
        gamma(BathSpectrum(1.0), math.nan)
    with pytest.raises(ValueError):
        BathSpectrum(1.0, lamb_shift={1.0: 0.3})


def test_lamb_shift_table_lookup():
    bath = BathSpectrum(1.0, lamb_shift={1.0: 0.25j, 0.0: -0.5j})
    assert bath.sigma(1.0) == 0.25j
    assert bath.sigma(1.0 + 1e-12) == 0.25j
    assert bath.sigma(0.0) == -0.5j
    assert bath.sigma(2.0) == 0j


betas = st.floats(0.01, 50.0)
omegas = st.floats(1e-3, 20.0)
families = st.sampled_from(["flat", "ohmic"])


@given(betas, omegas, families)
def test_detailed_balance(beta, omega, family):
    bath = BathSpectrum(beta, SpectralDensity(family, 1.3))
    up, down = gamma(bath, -omega), gamma(bath, omega)
    assert up == pytest.approx(math.exp(-beta * omega) * down, rel=1e-12, abs=1e-300)


@given(st.floats(0.01, 50.0), st.floats(-20.0, 20.0).filter(lambda w: abs(w) > 1e-6), families)
def test_non_negative(beta, omega, family):
    assert gamma(BathSpectrum(beta, SpectralDensity(family, 0.7)), omega) >= 0.0


@given(betas, betas, omegas)
def test_emission_non_increasing_in_beta(b1, b2, omega):
    lo, hi = sorted((b1, b2))
    g_lo = gamma(BathSpectrum(lo, FLAT2), omega)
    g_hi = gamma(BathSpectrum(hi, FLAT2), omega)
    assert g_hi <= g_lo * (1 + 1e-14)
