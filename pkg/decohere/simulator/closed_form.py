"""
Analytic approximations to the pulsed decoherence factor of a 1/f bath.

With tan^2 x ~ x^2 / (1 - 2x/pi):

    zero temperature:  gamma dt^2 [ ln(uv/ir) - ln((pi - uv dt)/(pi - ir dt))
                                    - Ci(uv t) + Ci(ir t) ]
    thermal part:      (gamma dt^2 / 2) [ ln(1 + T^2 t^2)
                                          + (2 dt T / pi)(1 - 1/(1 + T^2 t^2)) ]

The thermal part is the cutoff-free limit (ir -> 0, uv -> inf) with the
expansion coth x ~ 1 + 2 exp(-2x).
"""

import math
from typing import List, Union

import numpy as np
from scipy.special import exp1

from .errors import DomainError
from .models import ApproximationValidity, DecoherenceValue, PulseSchedule, SpectralDensity

# ============================================================================
# Configuration
# ============================================================================

EULER_GAMMA = 0.57721566490153286061

# Ci/Si use the power series up to here and the exponential integral beyond
SERIES_SWITCH = 4.0
SERIES_TERMS = 30

_REGIMES = ("valid", "marginal", "invalid")


# ============================================================================
# Cosine and sine integrals
# ============================================================================

def _ci_series(x: float) -> float:
    """gamma_E + ln x + sum_k (-1)^k x^2k / (2k (2k)!)."""
    terms = []
    power = 1.0
    x2 = x * x
    for k in range(1, SERIES_TERMS + 1):
        power *= -x2 / ((2 * k - 1) * (2 * k))
        terms.append(power / (2 * k))
    return EULER_GAMMA + math.log(x) + math.fsum(terms)


def _si_series(x: float) -> float:
    """sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)."""
    terms = [x]
    power = x
    x2 = x * x
    for k in range(1, SERIES_TERMS + 1):
        power *= -x2 / ((2 * k) * (2 * k + 1))
        terms.append(power / (2 * k + 1))
    return math.fsum(terms)


def _ci_auxiliary(x: float) -> float:
    """Ci(x) = -Re E1(i x)."""
    return float(-np.real(exp1(1j * x)))


def _si_auxiliary(x: float) -> float:
    """Si(x) = pi/2 + Im E1(i x)."""
    return float(math.pi / 2 + np.imag(exp1(1j * x)))


def cosine_integral(x: float) -> float:
    """
    Cosine integral Ci(x) = gamma_E + ln x + int_0^x (cos u - 1)/u du.

    Raises:
        DomainError: If x <= 0
    """
    if x <= 0:
        raise DomainError(f"Ci(x) needs x > 0, got {x}")
    return _ci_series(x) if x <= SERIES_SWITCH else _ci_auxiliary(x)


def sine_integral(x: float) -> float:
    """
    Sine integral Si(x) = int_0^x sin(u)/u du.

    Raises:
        DomainError: If x < 0
    """
    if x < 0:
        raise DomainError(f"Si(x) needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    return _si_series(x) if x <= SERIES_SWITCH else _si_auxiliary(x)


# ============================================================================
# Closed forms
# ============================================================================

def _require_one_over_f(spec: SpectralDensity) -> None:
    if spec.exponent != -1:
        raise DomainError(f"closed form exists for nu = -1 only, got nu = {spec.exponent}")


def _require_below_pole(spec: SpectralDensity, interval: float) -> None:
    if spec.uv_cutoff * interval >= math.pi:
        raise DomainError(
            f"closed form diverges for uv_cutoff * dt >= pi (got {spec.uv_cutoff * interval:.6g})"
        )


def pulsed_plateau_t0(spec: SpectralDensity, interval: float) -> float:
    """Long-time value of the zero-temperature closed form (Ci terms dropped)."""
    _require_one_over_f(spec)
    _require_below_pole(spec, interval)
    lower, upper = spec.ir_cutoff, spec.uv_cutoff
    bracket = math.log(upper / lower) - math.log((math.pi - upper * interval) / (math.pi - lower * interval))
    return spec.coupling * interval ** 2 * bracket


def gamma_pulsed_t0_closed(spec: SpectralDensity, schedule: PulseSchedule) -> float:
    """
    Zero-temperature closed form for a 1/f bath; the O(dt) remainder is omitted.

    Raises:
        DomainError: If nu != -1 or uv_cutoff * dt >= pi
    """
    t = schedule.total_time
    plateau = pulsed_plateau_t0(spec, schedule.interval)
    oscillation = -cosine_integral(spec.uv_cutoff * t) + cosine_integral(spec.ir_cutoff * t)
    return plateau + spec.coupling * schedule.interval ** 2 * oscillation


def gamma_pulsed_thermal_closed(coupling: float, interval: float, temperature: float, total_time: float) -> float:
    """
    Low-temperature correction to the 1/f pulsed factor (cutoff-free limit).

    Raises:
        DomainError: If T <= 0
    """
    if temperature <= 0:
        raise DomainError(f"thermal correction needs T > 0, got {temperature}")
    a = (temperature * total_time) ** 2
    bracket = math.log1p(a) + (2 * interval * temperature / math.pi) * (a / (1 + a))
    return 0.5 * coupling * interval ** 2 * bracket


def gamma_pulsed_closed(spec: SpectralDensity, schedule: PulseSchedule, temperature: float = 0.0) -> float:
    """Zero-temperature part plus the thermal correction when T > 0."""
    value = gamma_pulsed_t0_closed(spec, schedule)
    if temperature > 0:
        value += gamma_pulsed_thermal_closed(
            spec.coupling, schedule.interval, temperature, schedule.total_time
        )
    return value


def closed_form_value(spec: SpectralDensity, schedule: PulseSchedule, temperature: float = 0.0) -> DecoherenceValue:
    """gamma_pulsed_closed wrapped as a DecoherenceValue tagged method="closed_form"."""
    return DecoherenceValue(
        gamma=gamma_pulsed_closed(spec, schedule, temperature),
        time=schedule.total_time,
        method="closed_form",
    )


# ============================================================================
# Validity
# ============================================================================

def _interval_regime(spec: SpectralDensity, interval: float, reasons: List[str]) -> str:
    phase = spec.uv_cutoff * interval
    if phase < math.pi / 2:
        return "valid"
    if phase < math.pi:
        reasons.append(f"uv_cutoff * dt = {phase:.4g} is in [pi/2, pi): tan^2 approximation degrades")
        return "marginal"
    reasons.append(f"uv_cutoff * dt = {phase:.4g} >= pi: closed form diverges")
    return "invalid"


def _temperature_regime(spec: SpectralDensity, temperature: float, reasons: List[str]) -> str:
    if temperature <= 0:
        return "valid"
    low = spec.ir_cutoff / (2 * temperature)
    high = spec.uv_cutoff / (2 * temperature)
    if low > 1:
        return "valid"
    if high > 1:
        reasons.append(
            f"coth expansion needs w/2T > 1; holds at uv_cutoff ({high:.3g}) but not at ir_cutoff ({low:.3g})"
        )
        return "marginal"
    reasons.append(f"coth expansion fails across the band (uv_cutoff/2T = {high:.3g} <= 1)")
    return "invalid"


def check_validity(
    spec: SpectralDensity,
    schedule: Union[PulseSchedule, float],
    temperature: float = 0.0,
) -> ApproximationValidity:
    """
    Classify where the closed forms can be trusted.

    The regime is the worse of the pulse-interval criterion (uv_cutoff * dt
    against pi/2 and pi) and, for T > 0, the coth-expansion criterion.
    """
    interval = schedule.interval if isinstance(schedule, PulseSchedule) else float(schedule)
    reasons: List[str] = []
    regimes = [
        _interval_regime(spec, interval, reasons),
        _temperature_regime(spec, temperature, reasons),
    ]
    worst = max(regimes, key=_REGIMES.index)
    return ApproximationValidity(regime=worst, reasons=reasons)
