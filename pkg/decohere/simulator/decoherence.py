"""
Decoherence factors for free evolution and periodic pi-pulse decoupling.

    Gamma_0(t)      = int coth(w/2T) [1 - cos w t] I(w) / w^2 dw
    Gamma_P(N, dt)  = 4 int coth(w/2T) [1 - cos w t_2N] I(w) tan^2(w dt/2) / w^2 dw

over [ir_cutoff, uv_cutoff], with |rho_01(t)| = |rho_01(0)| exp(-Gamma).
"""

import cmath
import logging
import math
from typing import Optional

import numpy as np

from .errors import DomainError, UndefinedRatioError
from .models import BathSpec, DecoherenceValue, PulseSchedule, QuadratureConfig, QubitSpec
from .quadrature import (
    breakpoints,
    free_integrand,
    integrate,
    regularized_pulsed_integrand,
    relaxed_pulsed_integrand,
)

logger = logging.getLogger(__name__)


def gamma_free(bath: BathSpec, time: float, config: Optional[QuadratureConfig] = None) -> DecoherenceValue:
    """
    Free-evolution decoherence factor Gamma_0(t).

    Args:
        bath: Bath spectral density and temperature
        time: Elapsed time t >= 0; t = 0 returns exactly 0 without integrating
        config: Quadrature settings

    Raises:
        DomainError: If t < 0
    """
    if time < 0:
        raise DomainError(f"time must be nonnegative, got {time}")
    if time == 0:
        return DecoherenceValue(gamma=0.0, time=0.0)

    config = config or QuadratureConfig()
    spec = bath.density
    points = breakpoints(None, time, spec.ir_cutoff, spec.uv_cutoff, config.oscillation_resolution)
    result = integrate(
        lambda w: free_integrand(w, bath, time),
        points,
        config,
        label=f"gamma_free(t={time:g})",
    )
    return DecoherenceValue(gamma=max(result.value, 0.0), time=time, result=result)


def gamma_pulsed(
    bath: BathSpec,
    schedule: PulseSchedule,
    config: Optional[QuadratureConfig] = None,
) -> DecoherenceValue:
    """
    Decoherence factor Gamma_P(N, dt) after N full decoupling cycles.

    Uses the regularized integrand, so schedules with uv_cutoff * dt >= pi are
    valid: poles inside the band become panel edges.
    """
    config = config or QuadratureConfig()
    spec = bath.density
    t = schedule.total_time
    points = breakpoints(
        schedule.interval, t, spec.ir_cutoff, spec.uv_cutoff, config.oscillation_resolution
    )
    result = integrate(
        lambda w: regularized_pulsed_integrand(w, bath, schedule),
        points,
        config,
        label=f"gamma_pulsed(N={schedule.half_cycles}, dt={schedule.interval:g})",
    )
    return DecoherenceValue(gamma=max(result.value, 0.0), time=t, result=result)


def gamma_pulsed_relaxed(
    bath: BathSpec,
    interval: float,
    time: float,
    config: Optional[QuadratureConfig] = None,
) -> DecoherenceValue:
    """
    Pulsed decoherence factor at a continuous interval with the total time held fixed.

    The cancellation at the poles needs t = 2 N dt, so this form is limited
    to uv_cutoff * dt < pi.

    Raises:
        DomainError: If interval <= 0, t < 0 or uv_cutoff * dt >= pi
    """
    if interval <= 0:
        raise DomainError(f"interval must be positive, got {interval}")
    if time < 0:
        raise DomainError(f"time must be nonnegative, got {time}")
    spec = bath.density
    if spec.uv_cutoff * interval >= math.pi:
        raise DomainError(
            f"relaxed evaluation needs uv_cutoff * dt < pi, got {spec.uv_cutoff * interval}"
        )
    if time == 0:
        return DecoherenceValue(gamma=0.0, time=0.0)

    config = config or QuadratureConfig()
    points = breakpoints(None, time, spec.ir_cutoff, spec.uv_cutoff, config.oscillation_resolution)
    result = integrate(
        lambda w: relaxed_pulsed_integrand(w, bath, interval, time),
        points,
        config,
        label=f"gamma_pulsed_relaxed(dt={interval:g}, t={time:g})",
    )
    return DecoherenceValue(gamma=max(result.value, 0.0), time=time, result=result)


def coherence(qubit: QubitSpec, value: DecoherenceValue) -> complex:
    """rho_01(t) = exp(-i eps t) exp(-Gamma) rho_01(0)."""
    phase = cmath.exp(-1j * qubit.level_splitting * value.time)
    return phase * math.exp(-value.gamma) * qubit.initial_coherence


def residual_decoherence(value: DecoherenceValue) -> float:
    """Fraction of coherence lost, 1 - exp(-Gamma)."""
    return float(-np.expm1(-value.gamma))


def suppression_ratio(
    bath: BathSpec,
    schedule: PulseSchedule,
    config: Optional[QuadratureConfig] = None,
) -> float:
    """
    S = Gamma_P(N, dt) / Gamma_0(t_2N); below 1 the pulses suppress decoherence.

    Raises:
        UndefinedRatioError: If Gamma_0(t_2N) < 10 * abs_tol
    """
    config = config or QuadratureConfig()
    free = gamma_free(bath, schedule.total_time, config)
    if free.gamma < 10 * config.abs_tol:
        raise UndefinedRatioError(
            f"Gamma_0({schedule.total_time:g}) = {free.gamma:.3e} is below the division guard "
            f"{10 * config.abs_tol:.1e}"
        )
    pulsed = gamma_pulsed(bath, schedule, config)
    ratio = pulsed.gamma / free.gamma
    logger.debug(f"S(N={schedule.half_cycles}, dt={schedule.interval:g}) = {ratio:.6e}")
    return ratio
