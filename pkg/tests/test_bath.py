import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from decohere.simulator.bath import (
    density_at,
    filter_factor,
    is_enhancing,
    median_frequency,
    thermal_factor,
    thermal_time,
)
from decohere.simulator.errors import DomainError, ParameterError
from decohere.simulator.models import BathSpec, PulseSchedule, QubitSpec, SpectralDensity


# ============================================================================
# Types
# ============================================================================

def test_cutoffs_must_be_ordered():
    with pytest.raises(ValidationError):
        SpectralDensity(exponent=-1, coupling=1.0, ir_cutoff=10.0, uv_cutoff=1.0)


def test_coupling_must_be_positive():
    with pytest.raises(ValidationError):
        SpectralDensity(exponent=1, coupling=0.0, ir_cutoff=1.0, uv_cutoff=2.0)


def test_negative_temperature_rejected(one_over_f):
    with pytest.raises(ValidationError):
        BathSpec(density=one_over_f, temperature=-1.0)


def test_thermal_time(one_over_f):
    assert thermal_time(BathSpec(density=one_over_f, temperature=0.0)) is None
    assert thermal_time(BathSpec(density=one_over_f, temperature=4.0)) == 0.25


def test_schedule_total_time():
    schedule = PulseSchedule(interval=0.025, half_cycles=100)
    assert schedule.total_time == pytest.approx(5.0)


def test_schedule_from_total_time():
    schedule = PulseSchedule.from_total_time(4.0, 0.125)
    assert schedule.half_cycles == 16


def test_schedule_from_total_time_rejects_fractional_cycles():
    with pytest.raises(ParameterError):
        PulseSchedule.from_total_time(4.0, 0.3)


def test_schedule_rejects_zero_cycles():
    with pytest.raises(ValidationError):
        PulseSchedule(interval=0.1, half_cycles=0)


def test_qubit_defaults():
    qubit = QubitSpec()
    assert qubit.level_splitting == 0.0
    assert qubit.initial_coherence == 1 + 0j


def test_bath_at_temperature_keeps_density(one_over_f):
    cold = BathSpec(density=one_over_f)
    hot = cold.at_temperature(4.0)
    assert hot.density == one_over_f
    assert hot.temperature == 4.0
    assert hot.thermal_time == pytest.approx(0.25)
    assert cold.temperature == 0.0


# ============================================================================
# density_at
# ============================================================================

def test_density_one_over_f_at_unit_frequency(one_over_f):
    assert density_at(one_over_f, 1.0) == pytest.approx(0.25)


def test_density_ohmic(ohmic):
    assert density_at(ohmic, 5.0) == pytest.approx(0.25)


def test_density_sudden_cutoff(one_over_f):
    assert density_at(one_over_f, 80.0 * 1.01) == 0.0
    assert density_at(one_over_f, 0.5) == 0.0


def test_density_rejects_nonpositive_frequency(one_over_f):
    with pytest.raises(DomainError):
        density_at(one_over_f, 0.0)


def test_density_accepts_arrays(ohmic):
    omega = np.array([0.5, 1.0, 5.0, 20.0])
    np.testing.assert_allclose(density_at(ohmic, omega), [0.0, 0.05, 0.25, 0.0])


@given(st.floats(min_value=1e-3, max_value=1e3))
def test_density_nonnegative(omega):
    spec = SpectralDensity(exponent=-1, coupling=0.5, ir_cutoff=0.01, uv_cutoff=100.0)
    assert density_at(spec, omega) >= 0.0


def test_median_frequency_one_over_f_is_geometric_mean():
    spec = SpectralDensity(exponent=-1, coupling=1.0, ir_cutoff=1.0, uv_cutoff=100.0)
    assert median_frequency(spec) == pytest.approx(10.0)


def test_median_frequency_ohmic_concentrates_near_uv():
    one_over_f = SpectralDensity(exponent=-1, coupling=1.0, ir_cutoff=1.0, uv_cutoff=100.0)
    ohmic = SpectralDensity(exponent=1, coupling=1.0, ir_cutoff=1.0, uv_cutoff=100.0)
    assert median_frequency(ohmic) == pytest.approx(math.sqrt((1 + 100 ** 2) / 2))
    assert median_frequency(ohmic) > 50.0 > median_frequency(one_over_f)


# ============================================================================
# thermal_factor
# ============================================================================

def test_thermal_factor_zero_temperature_is_exactly_one():
    assert thermal_factor(0.0, 3.0) == 1.0


def test_thermal_factor_saturates():
    # omega / 2T = 50: coth - 1 ~ 2 exp(-100), far below double resolution
    assert thermal_factor(1.0, 100.0) == pytest.approx(1.0, abs=1e-15)


def test_thermal_factor_small_argument_series():
    # coth x = 1/x + x/3 - ..., x = 5e-4
    assert thermal_factor(10.0, 0.01) == pytest.approx(2000.0 + 5e-4 / 3, rel=1e-12)


def test_thermal_factor_rejects_negative_temperature():
    with pytest.raises(DomainError):
        thermal_factor(-1.0, 1.0)


@given(
    st.floats(min_value=0.01, max_value=100.0),
    st.floats(min_value=0.01, max_value=100.0),
)
def test_thermal_factor_monotone(temperature, omega):
    base = thermal_factor(temperature, omega)
    assert base >= 1.0
    assert thermal_factor(temperature, omega * 1.5) <= base
    assert thermal_factor(temperature * 1.5, omega) >= base


# ============================================================================
# filter_factor
# ============================================================================

def test_filter_factor_quarter_period():
    assert filter_factor(1.0, math.pi / 2) == pytest.approx(1.0)


def test_filter_factor_third_period():
    assert filter_factor(1.0, 2 * math.pi / 3) == pytest.approx(3.0)


def test_filter_factor_small_angle():
    phase = 1e-4
    assert filter_factor(1.0, phase) == pytest.approx((phase / 2) ** 2, rel=1e-6)


def test_filter_factor_pole_indicator():
    assert filter_factor(0.1, math.pi / 0.1) == math.inf
    assert filter_factor(0.1, 3 * math.pi / 0.1) == math.inf


@given(st.floats(min_value=0.01, max_value=30.0))
def test_filter_enhances_in_windows(phase):
    value = filter_factor(1.0, phase)
    if math.isinf(value):
        return
    wrapped = math.fmod(phase, 2 * math.pi)
    if abs(value - 1.0) > 1e-9 and min(abs(wrapped - math.pi / 2), abs(wrapped - 3 * math.pi / 2)) > 1e-9:
        assert (value > 1.0) == is_enhancing(1.0, phase)
