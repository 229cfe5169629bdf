"""
Pointwise bath factors: spectral density, thermal factor and pulse filter.

Every function accepts a float or a numpy array for omega and returns the
same kind. Scalar calls validate the domain and raise DomainError; array calls
are used by the quadrature on nodes that already lie inside the band.
"""

import math
from typing import Optional, Union

import numpy as np

from .errors import DomainError
from .models import BathSpec, SpectralDensity

ArrayLike = Union[float, np.ndarray]

# Distance to a pole (in units of omega * dt, relative) treated as the pole itself
POLE_RESOLUTION = 64 * np.finfo(float).eps


def _check_positive(name: str, value: ArrayLike) -> None:
    if np.any(np.asarray(value) <= 0):
        raise DomainError(f"{name} must be positive, got {value}")


def density_at(spec: SpectralDensity, omega: ArrayLike) -> ArrayLike:
    """
    Spectral density I(w) = gamma * w**nu inside [ir_cutoff, uv_cutoff], 0 outside.

    Args:
        spec: Power-law density with sudden cutoffs
        omega: Angular frequency (> 0)

    Returns:
        I(omega), nonnegative

    Raises:
        DomainError: If any omega <= 0
    """
    _check_positive("omega", omega)
    omega_arr = np.asarray(omega, dtype=float)
    inside = (omega_arr >= spec.ir_cutoff) & (omega_arr <= spec.uv_cutoff)
    value = np.where(inside, spec.coupling * np.power(omega_arr, spec.exponent), 0.0)
    return float(value) if np.ndim(omega) == 0 else value


def thermal_factor(temperature: float, omega: ArrayLike) -> ArrayLike:
    """
    coth(omega / 2T), exactly 1 at T = 0.

    1/tanh keeps full relative precision for small arguments (-> 2T/omega) and
    saturates to 1 for large ones.

    Raises:
        DomainError: If omega <= 0 or T < 0
    """
    _check_positive("omega", omega)
    if temperature < 0:
        raise DomainError(f"temperature must be nonnegative, got {temperature}")
    if temperature == 0:
        return 1.0 if np.ndim(omega) == 0 else np.ones_like(np.asarray(omega, dtype=float))
    value = 1.0 / np.tanh(np.asarray(omega, dtype=float) / (2.0 * temperature))
    return float(value) if np.ndim(omega) == 0 else value


def filter_factor(interval: float, omega: float) -> float:
    """
    Decoupling filter tan^2(omega dt / 2).

    Returns math.inf as the pole indicator when omega*dt is within machine
    resolution of an odd multiple of pi. The pole only cancels inside the full
    pulsed integrand (see quadrature.regularized_pulsed_integrand).

    Raises:
        DomainError: If omega <= 0 or interval <= 0
    """
    _check_positive("omega", omega)
    _check_positive("interval", interval)
    phase = omega * interval
    k = math.floor((phase - math.pi) / (2 * math.pi) + 0.5)
    offset = phase - (2 * k + 1) * math.pi
    if abs(offset) <= POLE_RESOLUTION * max(1.0, phase):
        return math.inf
    return math.tan(phase / 2) ** 2


def is_enhancing(interval: float, omega: float) -> bool:
    """True when (4n+1)pi/2 < omega*dt < (4n+3)pi/2, where the filter exceeds 1."""
    _check_positive("omega", omega)
    _check_positive("interval", interval)
    phase = math.fmod(omega * interval, 2 * math.pi)
    return math.pi / 2 < phase < 3 * math.pi / 2


def median_frequency(spec: SpectralDensity) -> float:
    """
    Frequency splitting the integrated density over the band into equal halves.

    For nu = -1 this is sqrt(ir * uv); otherwise w_med**(nu+1) is the mean of
    ir**(nu+1) and uv**(nu+1).
    """
    lower, upper = spec.ir_cutoff, spec.uv_cutoff
    power = spec.exponent + 1.0
    if power == 0:
        return math.sqrt(lower * upper)
    return (0.5 * (lower ** power + upper ** power)) ** (1.0 / power)


def thermal_time(bath: BathSpec) -> Optional[float]:
    """t_beta = 1/T, or None at zero temperature."""
    return bath.thermal_time
